#include "qge/nh_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "qge/error.hpp"

namespace qge {

namespace {

double fidelity(const StateVector& target, const StateVector& psi) {
  return std::norm(inner(target, psi)) / (target.norm() * target.norm() * psi.norm() * psi.norm());
}

std::size_t nearest(const std::vector<cplx>& values, cplx z) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (std::abs(values[i] - z) < std::abs(values[best] - z)) best = i;
  return best;
}

double dominance_of(const std::vector<cplx>& eigenvalues, std::size_t target, cplx alpha) {
  double other = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < eigenvalues.size(); ++i)
    if (i != target) other = std::max(other, (alpha * eigenvalues[i]).imag());
  return (alpha * eigenvalues[target]).imag() - other;
}

}  // namespace

EvolutionResult evolve(const ComplexMatrix& H, const StateVector& psi0, double T, int steps,
                       const std::optional<StateVector>& target) {
  if (!is_square(H) || H.rows() != static_cast<Eigen::Index>(psi0.dim()))
    throw DomainError("evolve: Hamiltonian does not match the state dimension");
  if (!(T > 0.0)) throw DomainError("evolve: T must be positive");
  if (steps < 1) throw DomainError("evolve: steps must be >= 1");
  if (target && target->dim() != psi0.dim()) throw DomainError("evolve: target dimension mismatch");

  const StateVector start = psi0.normalized();
  const double log_norm0 = std::log(psi0.norm());
  const auto dim = static_cast<Eigen::Index>(psi0.dim());

  EvolutionResult out;
  out.times.reserve(static_cast<std::size_t>(steps) + 1);
  for (int j = 0; j <= steps; ++j) {
    const double t = T * static_cast<double>(j) / steps;
    ComplexVector amps = expm(-kI * t * H) * start.amplitudes();
    const double norm = amps.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      std::ostringstream os;
      os << "evolve: state norm " << norm << " at t = " << t;
      throw NumericalError(os.str());
    }
    amps /= norm;
    StateVector state(std::move(amps));

    std::vector<double> pops(static_cast<std::size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) pops[static_cast<std::size_t>(i)] = std::norm(state[i]);

    out.times.push_back(t);
    out.populations.push_back(std::move(pops));
    out.log_norm_factors.push_back(std::log(norm) + log_norm0);
    if (target) out.fidelities.push_back(fidelity(*target, state));
    out.states.push_back(std::move(state));
  }
  return out;
}

cplx select_alpha(cplx e_plus, cplx e_minus) {
  const cplx gap = e_plus - e_minus;
  const double scale = std::max(std::abs(e_plus), std::abs(e_minus));
  if (std::abs(gap) <= 1e-12 * std::max(scale, 1e-300)) {
    std::ostringstream os;
    os << "select_alpha: degenerate eigenvalues " << e_plus << ", " << e_minus;
    throw ExceptionalPointError(os.str());
  }
  return kI * std::conj(gap) / std::abs(gap);
}

cplx resolve_alpha(const std::vector<cplx>& eigenvalues, std::size_t target, const AlphaPolicy& policy) {
  switch (policy.kind) {
    case AlphaPolicy::Kind::fixed:
      return policy.value;
    case AlphaPolicy::Kind::sign:
      return dominance_of(eigenvalues, target, 1.0) >= 0.0 ? cplx(1.0) : cplx(-1.0);
    case AlphaPolicy::Kind::automatic:
      break;
  }
  if (eigenvalues.size() == 2) return select_alpha(eigenvalues[target], eigenvalues[1 - target]);

  // Max-min of sinusoids in the rotation angle: coarse scan, then golden
  // section on the best bracket.
  auto margin = [&](double angle) { return dominance_of(eigenvalues, target, std::polar(1.0, angle)); };
  constexpr int kScan = 720;
  const double step = 2.0 * std::numbers::pi / kScan;
  int best = 0;
  for (int i = 1; i < kScan; ++i)
    if (margin(i * step) > margin(best * step)) best = i;
  double lo = (best - 1) * step, hi = (best + 1) * step;
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100; ++it) {
    const double a = hi - golden * (hi - lo), b = lo + golden * (hi - lo);
    if (margin(a) > margin(b)) hi = b;
    else lo = a;
  }
  const double angle = 0.5 * (lo + hi);
  if (margin(angle) <= 0.0)
    throw PreparationError("resolve_alpha: target eigenvalue cannot be made dominant by any rotation");
  return std::polar(1.0, angle);
}

PreparedPair prepare_dual_pair(const ComplexMatrix& H, const PrepConfig& config,
                               const std::optional<StateVector>& psi0) {
  if (!is_square(H)) throw DimensionError("prepare_dual_pair: Hamiltonian is not square");
  const EigResult right_eig = eig(H);
  if (right_eig.degenerate)
    throw ExceptionalPointError("prepare_dual_pair: degenerate spectrum (exceptional point)");

  std::vector<cplx> values;
  for (const auto& p : right_eig.pairs) values.push_back(p.value);
  const std::size_t target = config.target ? nearest(values, *config.target) : 0;
  const cplx energy = values[target];
  const cplx alpha = resolve_alpha(values, target, config.alpha);

  const EigResult left_eig = eig(ComplexMatrix(H.adjoint()));
  std::vector<cplx> left_values;
  for (const auto& p : left_eig.pairs) left_values.push_back(p.value);
  const StateVector exact_right(right_eig.pairs[target].vector);
  const StateVector exact_left(left_eig.pairs[nearest(left_values, std::conj(energy))].vector);

  const StateVector start = psi0 ? psi0->normalized() : StateVector::basis(exact_right.n_qubits(), 0);
  if (std::abs(inner(exact_left, start)) < 1e-12 || std::abs(inner(exact_right, start)) < 1e-12)
    throw PreparationError("prepare_dual_pair: initial state has no weight on the target eigenstate");

  EvolutionResult right = evolve(alpha * H, start, config.T, config.steps, exact_right);
  EvolutionResult left =
      evolve(ComplexMatrix(-std::conj(alpha) * H.adjoint()), start, config.T, config.steps, exact_left);

  DualPair pair{right.states.back(), left.states.back(), energy, {}};
  pair.overlap = inner(pair.psiL, pair.psiR);
  return {std::move(pair),   std::move(right), std::move(left), alpha,
          dominance_of(values, target, alpha), exact_right,      exact_left};
}

void write_trajectory_csv(std::ostream& os, const EvolutionResult& result,
                          const std::string& header_comment) {
  if (!header_comment.empty()) os << "# " << header_comment << '\n';
  const std::size_t dim = result.populations.empty() ? 0 : result.populations.front().size();
  os << "t";
  for (std::size_t i = 0; i < dim; ++i) os << ",pop_" << i;
  os << ",fidelity,norm_factor_log\n" << std::setprecision(17);
  for (std::size_t j = 0; j < result.times.size(); ++j) {
    os << result.times[j];
    for (double p : result.populations[j]) os << ',' << p;
    os << ',';
    if (!result.fidelities.empty()) os << result.fidelities[j];
    os << ',' << result.log_norm_factors[j] << '\n';
  }
}

}  // namespace qge
