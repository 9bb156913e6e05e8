#include "qge/ssh_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qge/error.hpp"

namespace qge::ssh {

namespace {
constexpr double kBoundaryTol = 1e-9;
}

void Params::validate() const {
  if (!std::isfinite(t1) || !std::isfinite(delta) || !std::isfinite(t2))
    throw InvalidParametersError("ssh: parameters must be finite");
  if (!(t2 > 0.0)) throw InvalidParametersError("ssh: t2 must be positive");
  if (bc == Boundary::obc && std::abs(std::abs(t1) - std::abs(delta)) <= kBoundaryTol * t2) {
    std::ostringstream os;
    os << "ssh: |t1| = |delta| = " << std::abs(t1) << " makes the GBZ radius degenerate";
    throw GbzDegenerateError(os.str());
  }
}

ComplexMatrix DVector::hamiltonian() const {
  return dx * pauli::X() + dy * pauli::Y() + dz * pauli::Z();
}

DVector d_bloch(double k, const Params& p) {
  return {p.t1 + p.t2 * std::cos(k), cplx(p.t2 * std::sin(k), -p.delta), 0.0};
}

double gbz_radius(const Params& p) {
  if (std::abs(std::abs(p.t1) - std::abs(p.delta)) <= kBoundaryTol * p.t2) {
    std::ostringstream os;
    os << "gbz_radius: |t1| = |delta| (" << p.t1 << ", " << p.delta << ")";
    throw GbzDegenerateError(os.str());
  }
  return std::sqrt(std::abs((p.t1 + p.delta) / (p.t1 - p.delta)));
}

cplx beta_of(double k, const Params& p) { return std::polar(gbz_radius(p), k); }

DVector d_nonbloch(double k, const Params& p) {
  const cplx beta = beta_of(k, p);
  const cplx inv = 1.0 / beta;
  return {p.t1 + 0.5 * (beta + inv) * p.t2, (beta - inv) * p.t2 / (2.0 * kI) - kI * p.delta, 0.0};
}

DVector d_for(double k, const Params& p) {
  return p.bc == Boundary::pbc ? d_bloch(k, p) : d_nonbloch(k, p);
}

cplx band_energy(const DVector& d) { return std::sqrt(d.dot_self()); }

std::array<cplx, 3> analytic_texture(const DVector& d) {
  const cplx dd = d.dot_self();
  const double scale = std::norm(d.dx) + std::norm(d.dy) + std::norm(d.dz);
  if (std::abs(dd) <= 1e-14 * scale || scale == 0.0) {
    std::ostringstream os;
    os << "analytic_texture: d . d = " << dd << " (exceptional point)";
    throw ExceptionalPointError(os.str());
  }
  const cplx root = std::sqrt(dd);
  return {d.dx / root, d.dy / root, d.dz / root};
}

AnalyticPair analytic_pair(const DVector& d, int band) {
  if (d.dz != 0.0) throw DomainError("analytic_pair: requires dz = 0");
  const cplx q_plus = d.dx + kI * d.dy;
  const cplx q_minus = d.dx - kI * d.dy;
  const cplx energy = (band >= 0 ? 1.0 : -1.0) * band_energy(d);

  ComplexVector r1(2), r2(2), l1(2), l2(2);
  r1 << q_minus, energy;
  r2 << energy, q_plus;
  l1 << std::conj(q_plus), std::conj(energy);
  l2 << std::conj(energy), std::conj(q_minus);
  return {energy, r1.norm() >= r2.norm() ? r1 : r2, l1.norm() >= l2.norm() ? l1 : l2};
}

double boundary_distance(const Params& p) {
  const double a = std::abs(p.t1), b = std::abs(p.delta), t = std::abs(p.t2);
  if (p.bc == Boundary::pbc) return std::min(std::abs(a + b - t), std::abs(std::abs(a - b) - t));
  return std::abs(std::abs(p.t1 * p.t1 - p.delta * p.delta) - p.t2 * p.t2);
}

HalfInteger expected_winding(const Params& p) {
  p.validate();
  if (boundary_distance(p) < kBoundaryTol) {
    std::ostringstream os;
    os << "expected_winding: (t1, delta) = (" << p.t1 << ", " << p.delta << ") is on a phase boundary";
    throw PhaseBoundaryError(os.str());
  }
  const double a = std::abs(p.t1), b = std::abs(p.delta), t = std::abs(p.t2);
  if (p.bc == Boundary::obc)
    return {std::abs(p.t1 * p.t1 - p.delta * p.delta) < p.t2 * p.t2 ? 2 : 0};
  if (a + b < t) return {2};
  if (std::abs(a - b) < t) return {1};
  return {0};
}

}  // namespace qge::ssh
