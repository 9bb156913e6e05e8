#include "qge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "qge/error.hpp"

namespace qge {

namespace pauli {
ComplexMatrix I() { return ComplexMatrix::Identity(2, 2); }
ComplexMatrix X() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
ComplexMatrix Y() {
  ComplexMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}
ComplexMatrix Z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}
}  // namespace pauli

double operator_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

double scaled_tolerance(const ComplexMatrix& m, double tol) {
  return tol * std::max(1.0, operator_norm(m));
}

bool is_square(const ComplexMatrix& m) { return m.rows() == m.cols() && m.rows() >= 1; }

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (!is_square(m)) return false;
  return operator_norm(m - m.adjoint()) <= scaled_tolerance(m, tol);
}

bool is_unitary(const ComplexMatrix& m, double tol) {
  if (!is_square(m)) return false;
  const auto id = ComplexMatrix::Identity(m.rows(), m.cols());
  return operator_norm(m.adjoint() * m - id) <= tol;
}

bool is_positive_definite(const ComplexMatrix& m, double tol) {
  if (!is_hermitian(m, tol)) return false;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()),
                                                  Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > scaled_tolerance(m, tol);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace {

void normalize_phase(ComplexVector& v) {
  v.normalize();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(best)) * (1.0 + 1e-12)) best = i;
  const double mag = std::abs(v(best));
  if (mag > 0.0) v *= std::conj(v(best)) / mag;
}

std::vector<EigenPair> eig2(const ComplexMatrix& m) {
  const cplx a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const cplx half_tr = 0.5 * (a + d);
  const cplx half_diff = 0.5 * (a - d);
  const cplx disc = std::sqrt(half_diff * half_diff + b * c);
  std::vector<EigenPair> out;
  for (const cplx lambda : {half_tr + disc, half_tr - disc}) {
    ComplexVector u(2), w(2);
    u << b, lambda - a;
    w << lambda - d, c;
    ComplexVector v = u.norm() >= w.norm() ? u : w;
    if (v.norm() == 0.0) {
      // m is a multiple of the identity; any basis works.
      v = ComplexVector::Zero(2);
      v(out.empty() ? 0 : 1) = 1.0;
    }
    normalize_phase(v);
    out.push_back({lambda, v});
  }
  return out;
}

}  // namespace

EigResult eig(const ComplexMatrix& m, const LinalgTolerances& tol) {
  if (!is_square(m)) {
    std::ostringstream os;
    os << "eig: expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw DimensionError(os.str());
  }
  const double norm = operator_norm(m);

  EigResult result;
  if (m.rows() == 1) {
    result.pairs.push_back({m(0, 0), ComplexVector::Ones(1)});
  } else if (m.rows() == 2) {
    result.pairs = eig2(m);
  } else {
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, true);
    if (solver.info() != Eigen::Success)
      throw NumericalError("eig: Schur iteration failed to converge");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      ComplexVector v = solver.eigenvectors().col(i);
      normalize_phase(v);
      result.pairs.push_back({solver.eigenvalues()(i), v});
    }
  }

  const double tie = tol.residual * std::max(1.0, norm);
  std::stable_sort(result.pairs.begin(), result.pairs.end(),
                   [tie](const EigenPair& x, const EigenPair& y) {
                     if (std::abs(x.value.imag() - y.value.imag()) > tie)
                       return x.value.imag() > y.value.imag();
                     return x.value.real() > y.value.real();
                   });

  for (std::size_t i = 0; i < result.pairs.size(); ++i)
    for (std::size_t j = i + 1; j < result.pairs.size(); ++j)
      if (std::abs(result.pairs[i].value - result.pairs[j].value) <= tol.degenerate * norm)
        result.degenerate = true;
  return result;
}

ComplexMatrix expm(const ComplexMatrix& m) {
  if (!is_square(m)) throw DimensionError("expm: expected a square matrix");
  ComplexMatrix out = m.exp();
  if (!out.allFinite()) {
    std::ostringstream os;
    os << "expm: overflow for input with operator norm " << operator_norm(m);
    throw NumericalError(os.str());
  }
  return out;
}

ComplexMatrix sqrtm_pd(const ComplexMatrix& m, const LinalgTolerances& tol) {
  if (!is_square(m)) throw DimensionError("sqrtm_pd: expected a square matrix");
  if (!is_hermitian(m, tol.hermitian)) {
    std::ostringstream os;
    os << "sqrtm_pd: input is not Hermitian (||m - m^H|| = "
       << operator_norm(m - m.adjoint()) << ")";
    throw DomainError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()));
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig <= scaled_tolerance(m, tol.positive)) {
    std::ostringstream os;
    os << "sqrtm_pd: input is not positive definite (minimal eigenvalue " << min_eig << ")";
    throw DomainError(os.str());
  }
  const ComplexMatrix& v = es.eigenvectors();
  return v * es.eigenvalues().cwiseSqrt().cast<cplx>().asDiagonal() * v.adjoint();
}

}  // namespace qge
