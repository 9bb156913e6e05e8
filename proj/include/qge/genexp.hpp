#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "qge/statevector.hpp"

namespace qge {

struct ExactMode {};
struct SampledMode {
  std::uint64_t shots = 10000;
  std::uint64_t seed = 0;
};
using MeasurementMode = std::variant<ExactMode, SampledMode>;

// <psi1|O|psi2> / <psi1|O'|psi2> for per-qubit product observables. An empty
// Oprime means sigma_0 on every qubit.
struct GenExpRequest {
  StateVector psi1;
  StateVector psi2;
  std::vector<ComplexMatrix> O;
  std::vector<ComplexMatrix> Oprime;
  MeasurementMode mode = ExactMode{};
};

struct GenExpResult {
  cplx value;
  cplx std_error;  // zero in exact mode
  // <Psi2| O (x) O' (x) sigma_x |Psi2>, the sigma_y variant, and the
  // denominator <Psi2| O' (x) O' (x) sigma_x |Psi2> = |<psi1|O'|psi2>|^2.
  double numerator_x = 0.0;
  double numerator_y = 0.0;
  double denominator = 0.0;
};

// Register layout: qubits [0, n) hold psi1, [n, 2n) hold psi2, qubit 2n is
// the ancilla.
struct SwapTestLayout {
  int n = 0;
  std::vector<int> system_a() const;
  std::vector<int> system_b() const;
  int ancilla() const { return 2 * n; }
};

// (|psi1>|psi2>|0> + |psi2>|psi1>|1>)/sqrt(2) via Hadamard on the ancilla and
// a controlled register swap.
StateVector build_swap_test_state(const StateVector& psi1, const StateVector& psi2);

GenExpResult generalized_expectation(const GenExpRequest& req);

// Observable description: one line per qubit, either a Pauli name (I X Y Z)
// or four row-major entries given as real numbers or as "re im" pairs.
std::vector<ComplexMatrix> read_observables(std::istream& is);
std::vector<ComplexMatrix> load_observables(const std::string& path);

}  // namespace qge
