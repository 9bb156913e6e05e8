#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qge {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

namespace pauli {
ComplexMatrix I();
ComplexMatrix X();
ComplexMatrix Y();
ComplexMatrix Z();
}  // namespace pauli

// Tolerances are relative to the operator norm of the input; see
// scaled_tolerance().
struct LinalgTolerances {
  double residual = 1e-12;
  double degenerate = 1e-9;
  double hermitian = 1e-10;
  double unitary = 1e-10;
  double positive = 1e-10;
};

// max(1, ||m||_2) * tol: absolute near zero, relative for large operators.
double scaled_tolerance(const ComplexMatrix& m, double tol);

double operator_norm(const ComplexMatrix& m);

bool is_square(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = 1e-10);
bool is_unitary(const ComplexMatrix& m, double tol = 1e-10);
bool is_positive_definite(const ComplexMatrix& m, double tol = 1e-10);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

struct EigenPair {
  cplx value;
  ComplexVector vector;  // unit norm, largest component real positive
};

struct EigResult {
  // Sorted by descending imaginary part, ties by descending real part.
  std::vector<EigenPair> pairs;
  // Some pair of eigenvalues is closer than tol.degenerate * ||m||.
  bool degenerate = false;
};

// Right eigensystem. 2x2 inputs use the closed form; larger inputs (up to
// 8x8) use a complex Schur iteration.
EigResult eig(const ComplexMatrix& m, const LinalgTolerances& tol = {});

// e^m by scaling and squaring with a Pade approximant.
ComplexMatrix expm(const ComplexMatrix& m);

// Principal square root of a Hermitian positive definite matrix.
ComplexMatrix sqrtm_pd(const ComplexMatrix& m, const LinalgTolerances& tol = {});

}  // namespace qge
