#pragma once

#include <random>

#include "qge/linalg.hpp"
#include "qge/statevector.hpp"

namespace qge::test {

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline cplx gaussian_c() {
  std::normal_distribution<double> g;
  return {g(rng()), g(rng())};
}

inline ComplexMatrix random_matrix(Eigen::Index n, double scale = 1.0) {
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = scale * gaussian_c();
  return m;
}

inline ComplexMatrix random_hermitian(Eigen::Index n) {
  const ComplexMatrix a = random_matrix(n);
  return 0.5 * (a + a.adjoint());
}

inline ComplexMatrix random_unitary(Eigen::Index n) {
  return expm(kI * random_hermitian(n));
}

inline StateVector random_state(int n_qubits) {
  ComplexVector v(Eigen::Index{1} << n_qubits);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = gaussian_c();
  return StateVector(ComplexVector(v / v.norm()));
}

inline double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace qge::test
