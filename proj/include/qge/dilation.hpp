#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qge/statevector.hpp"

namespace qge {

// Embeds i d/dt |psi> = H_eff |psi> into a Hermitian evolution of the system
// plus one ancilla (the last qubit). H_eff is alpha H for the right branch and
// -conj(alpha) H^H for the left one. The offset b enters through
// H' = H_eff - i b I.
struct DilationParams {
  double eta0 = 0.8;
  double b = 0.0;
  cplx alpha{1.0, 0.0};
  double T = 10.0;
  int steps = 10000;

  void validate() const;
  double theta() const;  // ancilla preparation angle 2 arctan(eta0)
};

enum class Branch { right, left };

enum class EtaDerivative {
  // Solve eta deta + deta eta = dM exactly, with dM = i (M H' - H'^H M).
  lyapunov,
  // Central differences of eta on the half-step grid (one-sided at the ends).
  central_difference,
};

struct SchedulePoint {
  double t = 0.0;
  ComplexMatrix M;
  ComplexMatrix eta;
  ComplexMatrix eta_dot;
  ComplexMatrix lambda;
  ComplexMatrix gamma;
  ComplexMatrix dilated;  // lambda (x) sigma_0 + gamma (x) sigma_z
  double hermiticity_residual = 0.0;  // ||dilated - dilated^H||
  double min_eig_m_minus_i = 0.0;
};

struct DilationSchedule {
  ComplexMatrix h_effective;
  ComplexMatrix h_prime;
  double dt = 0.0;
  std::vector<SchedulePoint> grid;       // t_j = j dt, j = 0..steps
  std::vector<SchedulePoint> midpoints;  // t_j + dt/2, j = 0..steps-1
  double max_hermiticity_residual = 0.0;
  double max_dilated_norm = 0.0;
};

ComplexMatrix effective_hamiltonian(const ComplexMatrix& H, cplx alpha, Branch branch);

// Throws InvalidParametersError at the first time where M - I stops being
// positive definite.
DilationSchedule build_schedule(const ComplexMatrix& H, const DilationParams& p,
                                Branch branch = Branch::right,
                                EtaDerivative derivative = EtaDerivative::lyapunov);

struct DilatedTrajectory {
  std::vector<double> times;
  std::vector<StateVector> states;    // postselected system states, normalized
  std::vector<double> success_probs;  // probability of the ancilla reading 0
};

// Ancilla |0> -> Y(theta) -> X(pi/2), midpoint-stepped evolution under the
// dilated Hamiltonian, then X(-pi/2) and projection onto |0> at every grid
// time.
DilatedTrajectory run_dilated(const StateVector& psi0, const DilationParams& p,
                              const DilationSchedule& schedule);

StateVector initial_dilated_state(const StateVector& psi0, const DilationParams& p);

// Product of the per-step unitaries over the whole schedule.
ComplexMatrix composed_propagator(const DilationSchedule& schedule);

// Columns: t, Lambda_0..z, Gamma_0..z, minEig(M-I). 2x2 systems only.
void write_schedule_csv(std::ostream& os, const DilationSchedule& schedule,
                        const std::string& header_comment = {});

}  // namespace qge
