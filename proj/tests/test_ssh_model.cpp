#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "qge/error.hpp"
#include "qge/ssh_model.hpp"

using namespace qge;
using namespace qge::ssh;

namespace {

constexpr double kPi = std::numbers::pi;

DVector random_d() { return {test::gaussian_c(), test::gaussian_c(), 0.0}; }

// <L+| sigma |R+> / <L+|R+> with the pair taken from two independent eigensolves.
std::array<cplx, 3> biorthogonal_texture(const DVector& d) {
  const ComplexMatrix h = d.hamiltonian();
  const cplx e = band_energy(d);
  const auto right = eig(h), left = eig(ComplexMatrix(h.adjoint()));
  auto pick = [](const EigResult& r, cplx z) {
    return std::abs(r.pairs[0].value - z) < std::abs(r.pairs[1].value - z) ? r.pairs[0].vector
                                                                            : r.pairs[1].vector;
  };
  const ComplexVector R = pick(right, e), L = pick(left, std::conj(e));
  const cplx norm = L.dot(R);
  return {L.dot(pauli::X() * R) / norm, L.dot(pauli::Y() * R) / norm, L.dot(pauli::Z() * R) / norm};
}

}  // namespace

TEST_CASE("Bloch field examples") {
  const DVector a = d_bloch(0.0, {1.0, 0.0});
  CHECK(std::abs(a.dx - 2.0) < 1e-15);
  CHECK(std::abs(a.dy) < 1e-15);
  const DVector b = d_bloch(kPi, {1.0, 0.0});
  CHECK(std::abs(b.dx) < 1e-15);
  CHECK(std::abs(b.dy) < 1e-15);
  const DVector c = d_bloch(kPi / 2, {0.2, 0.5});
  CHECK(std::abs(c.dx - 0.2) < 1e-15);
  CHECK(std::abs(c.dy - cplx(1.0, -0.5)) < 1e-15);
  CHECK(c.dz == cplx(0.0));
}

TEST_CASE("Bloch Hamiltonian has the SSH matrix form") {
  // [[0, t1 - delta + t2 e^{-ik}], [t1 + delta + t2 e^{ik}, 0]]
  for (int trial = 0; trial < 50; ++trial) {
    const Params p{test::uniform(-2, 2), test::uniform(-1, 1), test::uniform(0.5, 1.5)};
    const double k = test::uniform(-kPi, kPi);
    const ComplexMatrix h = d_bloch(k, p).hamiltonian();
    CHECK(std::abs(h(0, 0)) < 1e-15);
    CHECK(std::abs(h(1, 1)) < 1e-15);
    CHECK(std::abs(h(0, 1) - (p.t1 - p.delta + p.t2 * std::polar(1.0, -k))) < 1e-14);
    CHECK(std::abs(h(1, 0) - (p.t1 + p.delta + p.t2 * std::polar(1.0, k))) < 1e-14);
  }
}

TEST_CASE("GBZ radius") {
  CHECK(gbz_radius({0.7, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gbz_radius({0.4, 0.5}) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(gbz_radius({1.6, 0.5}) == doctest::Approx(std::sqrt(2.1 / 1.1)).epsilon(1e-14));
  CHECK_THROWS_AS(gbz_radius({0.5, 0.5}), GbzDegenerateError);
  CHECK_THROWS_AS(gbz_radius({0.5, -0.5}), GbzDegenerateError);
  CHECK_THROWS_AS(Params({0.5, 0.5, 1.0, Boundary::obc}).validate(), GbzDegenerateError);
  CHECK_NOTHROW(Params({0.5, 0.5, 1.0, Boundary::pbc}).validate());
  CHECK_THROWS_AS(Params({0.5, 0.1, 0.0}).validate(), InvalidParametersError);
}

TEST_CASE("non-Bloch field identities") {
  for (int trial = 0; trial < 100; ++trial) {
    const Params p{test::uniform(-2, 2), test::uniform(-1, 1)};
    if (std::abs(std::abs(p.t1) - std::abs(p.delta)) < 0.05) continue;
    const double k = test::uniform(-kPi, kPi);
    const DVector d = d_nonbloch(k, p);
    const cplx beta = beta_of(k, p);
    CHECK(std::abs(d.dx + kI * d.dy - (p.t1 + p.delta + p.t2 * beta)) < 1e-12);
    CHECK(std::abs(d.dx - kI * d.dy - (p.t1 - p.delta + p.t2 / beta)) < 1e-12);
    CHECK(std::abs(beta) == doctest::Approx(gbz_radius(p)).epsilon(1e-14));
  }
}

TEST_CASE("non-Bloch field reduces to the Bloch one without nonreciprocity") {
  for (int j = 0; j < 200; ++j) {
    const double k = -kPi + 2.0 * kPi * j / 200;
    const Params p{test::uniform(-2, 2), 0.0};
    const DVector a = d_nonbloch(k, p), b = d_bloch(k, p);
    CHECK(std::abs(a.dx - b.dx) < 1e-14);
    CHECK(std::abs(a.dy - b.dy) < 1e-14);
  }
}

TEST_CASE("d_for selects the field by boundary condition") {
  const Params pbc{0.4, 0.5}, obc{0.4, 0.5, 1.0, Boundary::obc};
  CHECK(std::abs(d_for(0.3, pbc).dy - d_bloch(0.3, pbc).dy) == 0.0);
  CHECK(std::abs(d_for(0.3, obc).dy - d_nonbloch(0.3, obc).dy) == 0.0);
}

TEST_CASE("eigenvalues are plus and minus sqrt(d.d)") {
  for (int trial = 0; trial < 200; ++trial) {
    const DVector d = random_d();
    const auto r = eig(d.hamiltonian());
    const cplx e = band_energy(d);
    CHECK(e.real() >= 0.0);
    const bool order = std::abs(r.pairs[0].value - e) < std::abs(r.pairs[0].value + e);
    CHECK(std::abs(r.pairs[order ? 0 : 1].value - e) < 1e-12 * std::max(1.0, std::abs(e)));
    CHECK(std::abs(r.pairs[order ? 1 : 0].value + e) < 1e-12 * std::max(1.0, std::abs(e)));
  }
}

TEST_CASE("analytic texture examples") {
  const auto n = analytic_texture({1.0, 0.0, 0.0});
  CHECK(std::abs(n[0] - 1.0) < 1e-15);
  CHECK(std::abs(n[1]) < 1e-15);
  for (int trial = 0; trial < 100; ++trial) {
    const DVector d = random_d();
    const auto t = analytic_texture(d);
    CHECK(std::abs(t[1] / t[0] - d.dy / d.dx) < 1e-12 * std::abs(d.dy / d.dx) + 1e-14);
  }
  CHECK_THROWS_AS(analytic_texture({1.0, kI, 0.0}), ExceptionalPointError);
}

TEST_CASE("analytic texture matches the biorthogonal eigenvector formula") {
  for (int trial = 0; trial < 200; ++trial) {
    const DVector d = random_d();
    const auto a = analytic_texture(d);
    const auto b = biorthogonal_texture(d);
    for (int c = 0; c < 3; ++c) CHECK(std::abs(a[c] - b[c]) < 1e-10);
  }
}

TEST_CASE("analytic pairs are biorthogonal dual eigenvectors") {
  for (int trial = 0; trial < 200; ++trial) {
    const DVector d = random_d();
    const ComplexMatrix h = d.hamiltonian();
    const auto plus = analytic_pair(d, +1), minus = analytic_pair(d, -1);
    for (const auto* p : {&plus, &minus}) {
      CHECK((h * p->right - p->energy * p->right).norm() < 1e-12 * p->right.norm() * std::max(1.0, std::abs(p->energy)));
      CHECK((h.adjoint() * p->left - std::conj(p->energy) * p->left).norm() <
            1e-12 * p->left.norm() * std::max(1.0, std::abs(p->energy)));
    }
    CHECK(std::abs(plus.left.dot(minus.right)) < 1e-10 * plus.left.norm() * minus.right.norm());
    CHECK(std::abs(minus.left.dot(plus.right)) < 1e-10 * minus.left.norm() * plus.right.norm());
  }
}

TEST_CASE("both bands give the same phase ratio") {
  for (int trial = 0; trial < 50; ++trial) {
    const DVector d = random_d();
    const auto plus = analytic_pair(d, +1), minus = analytic_pair(d, -1);
    auto ratio = [](const AnalyticPair& p) {
      return p.left.dot(pauli::Y() * p.right) / p.left.dot(pauli::X() * p.right);
    };
    CHECK(std::abs(ratio(plus) - ratio(minus)) < 1e-10 * std::max(1.0, std::abs(ratio(plus))));
  }
}

TEST_CASE("expected winding regimes") {
  CHECK(expected_winding({0.2, 0.5}).value() == 1.0);
  CHECK(expected_winding({1.0, 0.5}).value() == 0.5);
  CHECK(expected_winding({1.8, 0.5}).value() == 0.0);
  CHECK(expected_winding({0.4, 0.5, 1.0, Boundary::obc}).value() == 1.0);
  CHECK(expected_winding({1.6, 0.5, 1.0, Boundary::obc}).value() == 0.0);

  const double edge = std::sqrt(1.25);
  CHECK_THROWS_AS(expected_winding({edge, 0.5, 1.0, Boundary::obc}), PhaseBoundaryError);
  CHECK(expected_winding({edge - 1e-3, 0.5, 1.0, Boundary::obc}).value() == 1.0);
  CHECK(expected_winding({edge + 1e-3, 0.5, 1.0, Boundary::obc}).value() == 0.0);
  CHECK_THROWS_AS(expected_winding({0.5, 0.5}), PhaseBoundaryError);
  CHECK_THROWS_AS(expected_winding({1.5, 0.5}), PhaseBoundaryError);
  CHECK(boundary_distance({0.2, 0.5}) == doctest::Approx(0.3));
}

TEST_CASE("exceptional point at the Bloch transition momentum") {
  // t1 + delta = t2 closes q- at k = pi: d.d = 0 there.
  const Params p{0.5, 0.5};
  CHECK(std::abs(d_bloch(kPi, p).dot_self()) < 1e-15);
  CHECK_THROWS_AS(analytic_texture(d_bloch(kPi, p)), ExceptionalPointError);
  const Params q{1.5, 0.5};
  CHECK(std::abs(d_bloch(kPi, q).dot_self()) < 1e-15);
}
