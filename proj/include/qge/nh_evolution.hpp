#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qge/statevector.hpp"

namespace qge {

// Trajectory of i d/dt |psi> = H |psi>, renormalized at every stored time.
struct EvolutionResult {
  std::vector<double> times;
  std::vector<StateVector> states;
  std::vector<std::vector<double>> populations;
  std::vector<double> fidelities;  // empty unless a target was supplied
  // log of the norm the unnormalized state would have had.
  std::vector<double> log_norm_factors;
};

EvolutionResult evolve(const ComplexMatrix& H, const StateVector& psi0, double T, int steps,
                       const std::optional<StateVector>& target = std::nullopt);

// Unit-modulus alpha maximizing Im{alpha (E+ - E-)}.
cplx select_alpha(cplx e_plus, cplx e_minus);

struct AlphaPolicy {
  enum class Kind {
    automatic,  // maximize the imaginary gap of the target
    sign,       // +1 or -1, whichever makes the target dominant
    fixed,
  };
  Kind kind = Kind::automatic;
  cplx value{1.0, 0.0};

  static AlphaPolicy automatic() { return {}; }
  static AlphaPolicy sign() { return {Kind::sign, {1.0, 0.0}}; }
  static AlphaPolicy fixed(cplx alpha) { return {Kind::fixed, alpha}; }
};

struct PrepConfig {
  double T = 10.0;
  int steps = 100;
  AlphaPolicy alpha;
  // Eigenvalue to target; the nearest eigenvalue of H is used. Defaults to
  // the one with the largest imaginary part.
  std::optional<cplx> target;
};

struct DualPair {
  StateVector psiR;
  StateVector psiL;
  cplx eigenvalue;
  cplx overlap;  // <psiL|psiR>
};

struct PreparedPair {
  DualPair pair;
  EvolutionResult right;
  EvolutionResult left;
  cplx alpha;
  // Im{alpha E_target} - max over other eigenvalues of Im{alpha E}; the
  // preparation converges only when this is positive.
  double dominance = 0.0;
  StateVector exact_right;
  StateVector exact_left;
};

// Evolves psi0 (default |0...0>) under alpha H and -conj(alpha) H^H for the
// right and left branches.
PreparedPair prepare_dual_pair(const ComplexMatrix& H, const PrepConfig& config,
                               const std::optional<StateVector>& psi0 = std::nullopt);

// Resolves the multiplier for the given target without evolving.
cplx resolve_alpha(const std::vector<cplx>& eigenvalues, std::size_t target, const AlphaPolicy& policy);

// Columns: t, pop_0.., fidelity, norm_factor_log.
void write_trajectory_csv(std::ostream& os, const EvolutionResult& result,
                          const std::string& header_comment = {});

}  // namespace qge
