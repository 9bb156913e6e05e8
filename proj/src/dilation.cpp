#include "qge/dilation.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "qge/error.hpp"

namespace qge {

void DilationParams::validate() const {
  if (!(eta0 > 0.0)) throw InvalidParametersError("dilation: eta0 must be positive");
  if (!std::isfinite(b)) throw InvalidParametersError("dilation: b must be finite");
  if (std::abs(std::abs(alpha) - 1.0) > 1e-12)
    throw InvalidParametersError("dilation: alpha must have unit modulus");
  if (!(T > 0.0)) throw InvalidParametersError("dilation: T must be positive");
  if (steps < 10) throw InvalidParametersError("dilation: steps must be >= 10");
}

double DilationParams::theta() const { return 2.0 * std::atan(eta0); }

ComplexMatrix effective_hamiltonian(const ComplexMatrix& H, cplx alpha, Branch branch) {
  if (branch == Branch::right) return alpha * H;
  return -std::conj(alpha) * H.adjoint();
}

namespace {

struct Frame {
  double t;
  ComplexMatrix M;
  ComplexMatrix M_dot;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eigs;  // of M - I
  ComplexMatrix eta;
};

ComplexMatrix lyapunov_derivative(const Frame& f) {
  // eta = V diag(s) V^H; (V^H deta V)_ij = (V^H dM V)_ij / (s_i + s_j).
  const ComplexMatrix& v = f.eigs.eigenvectors();
  const Eigen::VectorXd s = f.eigs.eigenvalues().cwiseSqrt();
  ComplexMatrix x = v.adjoint() * f.M_dot * v;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) /= s(i) + s(j);
  return v * x * v.adjoint();
}

SchedulePoint finish(const Frame& f, const ComplexMatrix& eta_dot, const ComplexMatrix& h_prime) {
  const ComplexMatrix& v = f.eigs.eigenvectors();
  const Eigen::VectorXd m_eigs = f.eigs.eigenvalues().array() + 1.0;
  const ComplexMatrix m_inv = v * m_eigs.cwiseInverse().cast<cplx>().asDiagonal() * v.adjoint();

  SchedulePoint pt;
  pt.t = f.t;
  pt.M = f.M;
  pt.eta = f.eta;
  pt.eta_dot = eta_dot;
  pt.lambda = (h_prime + (kI * eta_dot + f.eta * h_prime) * f.eta) * m_inv;
  pt.gamma = kI * (h_prime * f.eta - f.eta * h_prime - kI * eta_dot) * m_inv;
  pt.dilated = kron(pt.lambda, pauli::I()) + kron(pt.gamma, pauli::Z());
  pt.hermiticity_residual = operator_norm(pt.dilated - pt.dilated.adjoint());
  pt.min_eig_m_minus_i = f.eigs.eigenvalues().minCoeff();
  return pt;
}

}  // namespace

DilationSchedule build_schedule(const ComplexMatrix& H, const DilationParams& p, Branch branch,
                                EtaDerivative derivative) {
  p.validate();
  if (!is_square(H)) throw DimensionError("build_schedule: Hamiltonian is not square");
  const auto dim = H.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);

  DilationSchedule sched;
  sched.h_effective = effective_hamiltonian(H, p.alpha, branch);
  sched.h_prime = sched.h_effective - kI * p.b * id;
  sched.dt = p.T / p.steps;

  // M(t) = G M(0) G^H with dG/dt = -i H'^H G, stepped on the half grid so
  // that the midpoint Hamiltonians come out of the same recursion.
  const double half = 0.5 * sched.dt;
  const ComplexMatrix half_step = expm(-kI * half * ComplexMatrix(sched.h_prime.adjoint()));
  const double m0 = 1.0 + p.eta0 * p.eta0;
  const int n_frames = 2 * p.steps + 1;

  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(n_frames));
  ComplexMatrix G = id;
  for (int m = 0; m < n_frames; ++m) {
    if (m > 0) G = half_step * G;
    Frame f;
    f.t = m * half;
    ComplexMatrix M = m0 * G * G.adjoint();
    f.M = 0.5 * (M + M.adjoint());
    f.M_dot = kI * (f.M * sched.h_prime - sched.h_prime.adjoint() * f.M);
    f.eigs.compute(f.M - id);
    const double min_eig = f.eigs.eigenvalues().minCoeff();
    if (!(min_eig > 0.0)) {
      std::ostringstream os;
      os << "build_schedule: M - I loses positive definiteness at t = " << f.t
         << " (minimal eigenvalue " << min_eig << "); choose larger eta0 or b";
      throw InvalidParametersError(os.str());
    }
    f.eta = sqrtm_pd(f.M - id);
    frames.push_back(std::move(f));
  }

  for (int m = 0; m < n_frames; ++m) {
    ComplexMatrix eta_dot;
    if (derivative == EtaDerivative::lyapunov) {
      eta_dot = lyapunov_derivative(frames[m]);
    } else if (m == 0) {
      eta_dot = (frames[1].eta - frames[0].eta) / half;
    } else if (m == n_frames - 1) {
      eta_dot = (frames[m].eta - frames[m - 1].eta) / half;
    } else {
      eta_dot = (frames[m + 1].eta - frames[m - 1].eta) / (2.0 * half);
    }
    SchedulePoint pt = finish(frames[m], eta_dot, sched.h_prime);
    sched.max_hermiticity_residual = std::max(sched.max_hermiticity_residual, pt.hermiticity_residual);
    sched.max_dilated_norm = std::max(sched.max_dilated_norm, operator_norm(pt.dilated));
    (m % 2 == 0 ? sched.grid : sched.midpoints).push_back(std::move(pt));
  }
  return sched;
}

StateVector initial_dilated_state(const StateVector& psi0, const DilationParams& p) {
  psi0.require_normalized("initial_dilated_state");
  const int anc = psi0.n_qubits();
  StateVector state = tensor(psi0, StateVector(1));
  state = apply(std::move(state), gates::ry(p.theta(), anc));
  return apply(std::move(state), gates::rx(std::numbers::pi / 2, anc));
}

namespace {

std::vector<int> all_qubits(int n) {
  std::vector<int> q(static_cast<std::size_t>(n));
  std::iota(q.begin(), q.end(), 0);
  return q;
}

}  // namespace

DilatedTrajectory run_dilated(const StateVector& psi0, const DilationParams& p,
                              const DilationSchedule& schedule) {
  p.validate();
  if (static_cast<Eigen::Index>(psi0.dim()) != schedule.h_prime.rows())
    throw DimensionError("run_dilated: state does not match the schedule dimension");
  if (schedule.grid.size() != static_cast<std::size_t>(p.steps) + 1)
    throw DimensionError("run_dilated: schedule was built for a different step count");

  const int anc = psi0.n_qubits();
  const std::vector<int> targets = all_qubits(anc + 1);
  StateVector state = initial_dilated_state(psi0, p);

  DilatedTrajectory out;
  for (std::size_t j = 0; j < schedule.grid.size(); ++j) {
    if (j > 0) {
      const ComplexMatrix step = expm(-kI * schedule.dt * schedule.midpoints[j - 1].dilated);
      state = apply(std::move(state), GateOp(step, targets));
    }
    const StateVector readout = apply(state, gates::rx(-std::numbers::pi / 2, anc));
    double p0 = 0.0;
    for (std::size_t i = 0; i < readout.dim(); ++i)
      if (bit_of(i, anc, anc + 1) == 0) p0 += std::norm(readout[i]);
    if (p0 < 1e-12) {
      std::ostringstream os;
      os << "run_dilated: postselection probability " << p0 << " at t = " << schedule.grid[j].t;
      throw NumericalError(os.str());
    }
    const PostselectResult selected = postselect(readout, anc, 0);
    out.times.push_back(schedule.grid[j].t);
    out.states.push_back(remove_qubit(selected.state, anc));
    out.success_probs.push_back(selected.probability);
  }
  return out;
}

ComplexMatrix composed_propagator(const DilationSchedule& schedule) {
  const auto dim = schedule.h_prime.rows() * 2;
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  for (const auto& mid : schedule.midpoints) u = expm(-kI * schedule.dt * mid.dilated) * u;
  return u;
}

void write_schedule_csv(std::ostream& os, const DilationSchedule& schedule,
                        const std::string& header_comment) {
  if (schedule.h_prime.rows() != 2)
    throw DimensionError("write_schedule_csv: Pauli components need a 2x2 system");
  const ComplexMatrix basis[4] = {pauli::I(), pauli::X(), pauli::Y(), pauli::Z()};
  if (!header_comment.empty()) os << "# " << header_comment << '\n';
  os << "t,Lambda_0,Lambda_x,Lambda_y,Lambda_z,Gamma_0,Gamma_x,Gamma_y,Gamma_z,minEig(M-I)\n"
     << std::setprecision(17);
  for (const auto& pt : schedule.grid) {
    os << pt.t;
    for (const ComplexMatrix* m : {&pt.lambda, &pt.gamma})
      for (const auto& s : basis) os << ',' << 0.5 * ((*m) * s).trace().real();
    os << ',' << pt.min_eig_m_minus_i << '\n';
  }
}

}  // namespace qge
