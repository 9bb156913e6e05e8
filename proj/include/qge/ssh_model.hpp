#pragma once

#include <array>

#include "qge/linalg.hpp"

namespace qge::ssh {

enum class Boundary { pbc, obc };

// Nonreciprocal SSH chain: intra-cell hoppings t1 +- delta, inter-cell t2.
// Energies are in units of t2.
struct Params {
  double t1 = 0.0;
  double delta = 0.0;
  double t2 = 1.0;
  Boundary bc = Boundary::pbc;

  void validate() const;
};

// Effective complex field with H = d . sigma. dz is identically zero here.
struct DVector {
  cplx dx;
  cplx dy;
  cplx dz;

  cplx dot_self() const { return dx * dx + dy * dy + dz * dz; }
  ComplexMatrix hamiltonian() const;
};

DVector d_bloch(double k, const Params& p);

// sqrt|(t1 + delta)/(t1 - delta)|
double gbz_radius(const Params& p);
cplx beta_of(double k, const Params& p);

DVector d_nonbloch(double k, const Params& p);

// Bloch field under PBC, non-Bloch field under OBC.
DVector d_for(double k, const Params& p);

// Principal root with Re >= 0; the "+" band is +band_energy(d).
cplx band_energy(const DVector& d);

// n = d / sqrt(d . d); throws ExceptionalPointError when d . d = 0.
std::array<cplx, 3> analytic_texture(const DVector& d);

// Right and left eigenvectors of d . sigma for the given band (+1 or -1),
// unnormalized, built from q+- = dx +- i dy: R = (q-, E) or (E, q+), and
// L = (conj q+, conj E) or (conj E, conj q-), whichever is larger.
struct AnalyticPair {
  cplx energy;
  ComplexVector right;
  ComplexVector left;
};
AnalyticPair analytic_pair(const DVector& d, int band);

// Winding numbers are multiples of 1/2; stored as twice the value.
struct HalfInteger {
  int twice = 0;
  double value() const { return 0.5 * twice; }
  friend bool operator==(HalfInteger, HalfInteger) = default;
};

// Throws PhaseBoundaryError within 1e-9 of a transition.
HalfInteger expected_winding(const Params& p);

// Smallest gap between the two sides of any regime inequality, e.g.
// | |t1^2 - delta^2| - t2^2 | under OBC.
double boundary_distance(const Params& p);

}  // namespace qge::ssh
