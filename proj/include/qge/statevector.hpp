#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qge/linalg.hpp"

namespace qge {

// Amplitudes of an n-qubit register. Qubit 0 is the most significant bit of
// the basis label, so |q0 q1 ... q_{n-1}> has index sum_q b_q 2^(n-1-q).
class StateVector {
 public:
  // |0...0>
  explicit StateVector(int n_qubits);
  // Takes ownership of 2^n amplitudes; they need not be normalized, in which
  // case the state carries the unnormalized flag.
  explicit StateVector(ComplexVector amplitudes);

  static StateVector basis(int n_qubits, std::uint64_t index);

  int n_qubits() const noexcept { return n_qubits_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(amps_.size()); }
  const ComplexVector& amplitudes() const noexcept { return amps_; }
  cplx operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

  double norm() const { return amps_.norm(); }
  bool unnormalized() const noexcept { return unnormalized_; }
  StateVector normalized() const;

  // Throws DomainError unless the norm is 1 within 1e-10.
  void require_normalized(const char* where) const;

  // Low-level mutable access for engine code; refreshes the flag afterwards.
  template <class F>
  void transform(F&& f) {
    f(amps_);
    refresh_flag();
  }

 private:
  void refresh_flag();

  int n_qubits_;
  ComplexVector amps_;
  bool unnormalized_ = false;
};

// |a> (x) |b> with a's qubits first.
StateVector tensor(const StateVector& a, const StateVector& b);

cplx inner(const StateVector& a, const StateVector& b);  // <a|b>

struct GateOp {
  GateOp(ComplexMatrix matrix, std::vector<int> targets);

  ComplexMatrix matrix;
  // targets[0] addresses the most significant bit of the gate's own index.
  std::vector<int> targets;
};

namespace gates {
GateOp hadamard(int q);
GateOp pauli_x(int q);
GateOp pauli_y(int q);
GateOp pauli_z(int q);
// e^{-i theta/2 sigma}
GateOp rx(double theta, int q);
GateOp ry(double theta, int q);
GateOp rz(double theta, int q);
GateOp swap(int a, int b);
GateOp fredkin(int control, int a, int b);

ComplexMatrix rx_matrix(double theta);
ComplexMatrix ry_matrix(double theta);
ComplexMatrix rz_matrix(double theta);
}  // namespace gates

StateVector apply(StateVector state, const GateOp& gate);

// Applies an arbitrary (not necessarily unitary) matrix to the target qubits.
// The result is generally unnormalized.
StateVector apply_matrix(StateVector state, const ComplexMatrix& m, std::span<const int> targets);

// Swaps registers a and b qubit by qubit when the control qubit is |1>.
StateVector controlled_register_swap(StateVector state, int control, std::span<const int> reg_a,
                                     std::span<const int> reg_b);

// <psi| (x)_q ops[q] |psi> for one Hermitian 2x2 factor per qubit.
double expectation(const StateVector& state, std::span<const ComplexMatrix> per_qubit_ops);

struct SampleCounts {
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  int n_qubits = 0;
  // Basis index -> count, only nonzero entries.
  std::map<std::uint64_t, std::uint64_t> joint;
  // per_qubit[q] = {N0, N1}
  std::vector<std::array<std::uint64_t, 2>> per_qubit;
};

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from 53 random bits; independent of the standard
// library's distribution implementation.
double uniform01(Rng& rng);

// Decorrelated seed for the given stream of a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

SampleCounts sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed);

struct PostselectResult {
  StateVector state;  // projected and renormalized, same qubit count
  double probability;
};

PostselectResult postselect(const StateVector& state, int qubit, int outcome);

// Drops a qubit that is in a definite computational basis state.
StateVector remove_qubit(const StateVector& state, int qubit, double tol = 1e-10);

int bit_of(std::uint64_t index, int qubit, int n_qubits);

// State file: "nqubits <n>" then 2^n lines "<re> <im>".
void write_state(std::ostream& os, const StateVector& state);
StateVector read_state(std::istream& is);
StateVector load_state(const std::string& path);
void save_state(const std::string& path, const StateVector& state);

}  // namespace qge
