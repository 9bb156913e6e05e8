#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "helpers.hpp"
#include "qge/error.hpp"
#include "qge/experiment.hpp"

using namespace qge;
using namespace qge::experiment;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<cplx> phases_of_angle(int n, double turns) {
  std::vector<cplx> phis;
  for (int j = 0; j < n; ++j) {
    const double theta = 2.0 * kPi * turns * j / n;
    phis.push_back(complex_angle(std::cos(theta), std::sin(theta)));
  }
  return phis;
}

double texture_error(const TextureSample& s, const ssh::Params& p) {
  const auto ref = ssh::analytic_texture(ssh::d_for(s.k, p));
  double err = 0.0;
  for (int c = 0; c < 3; ++c) err = std::max(err, std::abs(s.n[c] - ref[c]));
  return err;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("complex angle solves tan(phi) = ny / nx") {
  for (int trial = 0; trial < 500; ++trial) {
    const cplx nx = test::gaussian_c(), ny = test::gaussian_c();
    const cplx phi = complex_angle(nx, ny);
    CHECK(phi.real() > -kPi / 2);
    CHECK(phi.real() <= kPi / 2 + 1e-15);
    CHECK(std::abs(std::tan(phi) - ny / nx) < 1e-9 * std::max(1.0, std::abs(ny / nx)));
  }
  CHECK(std::abs(complex_angle(1.0, 0.0)) < 1e-15);
  CHECK(complex_angle(0.0, 1.0).real() == doctest::Approx(kPi / 2));
  CHECK_THROWS_AS(complex_angle(1.0, kI), ExceptionalPointError);
}

TEST_CASE("k grid") {
  const auto ks = k_grid(8);
  REQUIRE(ks.size() == 8);
  CHECK(ks.front() == -kPi);
  CHECK(ks[4] == doctest::Approx(0.0));
  CHECK(ks.back() == doctest::Approx(kPi - kPi / 4));
}

TEST_CASE("winding from phases examples") {
  CHECK(winding_from_phases(std::vector<cplx>(32, cplx(0.3, 0.1))).value == 0.0);
  CHECK(winding_from_phases(phases_of_angle(64, 1.0)).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(winding_from_phases(phases_of_angle(64, 0.5)).value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(winding_from_phases(phases_of_angle(64, -1.0)).value == doctest::Approx(-1.0).epsilon(1e-12));
  // A pi jump between neighbours is a branch change, not a rotation.
  std::vector<cplx> jump(32, cplx(0.2));
  for (int j = 16; j < 32; ++j) jump[j] = cplx(0.2 - kPi / 2 + 0.1);
  CHECK(winding_from_phases(jump).value == doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(winding_from_phases(std::vector<cplx>(15)), DomainError);
  std::vector<cplx> quarter(16);
  for (int j = 0; j < 16; ++j) quarter[j] = cplx(j % 2 ? kPi / 2 : 0.0);
  CHECK_THROWS_AS(winding_from_phases(quarter), AmbiguousBranchError);
}

TEST_CASE("winding oracle examples") {
  CHECK(winding_oracle({0.2, 0.5}, 1000).value == 1.0);
  CHECK(winding_oracle({1.0, 0.5}, 1000).value == 0.5);
  CHECK(winding_oracle({1.8, 0.5}, 1000).value == 0.0);
  CHECK(winding_oracle({0.4, 0.5, 1.0, ssh::Boundary::obc}, 1000).value == 1.0);
  CHECK(winding_oracle({1.6, 0.5, 1.0, ssh::Boundary::obc}, 1000).value == 0.0);
  CHECK(winding_oracle({0.0, 0.0}, 100).value == 1.0);
  CHECK_THROWS_AS(winding_oracle({0.5, 0.5}, 1000), ExceptionalPointError);
  CHECK_THROWS_AS(winding_oracle({0.2, 0.5}, 2), DomainError);
}

TEST_CASE("winding oracle agrees with the expected regime off the boundaries") {
  for (int trial = 0; trial < 100; ++trial) {
    const ssh::Params p{test::uniform(0.0, 2.0), test::uniform(0.0, 0.8)};
    if (ssh::boundary_distance(p) < 0.02) continue;
    CHECK(winding_oracle(p, 1000).value == ssh::expected_winding(p).value());
  }
}

TEST_CASE("measured texture matches the analytic texture") {
  const ssh::Params cases[] = {{0.2, 0.5}, {1.0, 0.5}, {1.8, 0.5}, {0.4, 0.5, 1.0, ssh::Boundary::obc}};
  for (const auto& p : cases) {
    double worst10 = 0.0, worst20 = 0.0;
    for (double k : {-2.5, -1.0, 0.3, 1.2, 2.0}) {
      worst10 = std::max(worst10, texture_error(measure_texture(k, p, {10.0, 100}, ExactMode{}), p));
      worst20 = std::max(worst20, texture_error(measure_texture(k, p, {20.0, 200}, ExactMode{}), p));
    }
    CHECK(worst10 <= 0.05);
    CHECK(worst20 < 1e-3);
  }
}

TEST_CASE("Hermitian limit gives the real texture") {
  const ssh::Params p{0.3, 0.0};
  for (double k : {-2.0, -0.5, 0.7, 2.9}) {
    const TextureSample s = measure_texture(k, p, {20.0, 200}, ExactMode{});
    CHECK(texture_error(s, p) < 1e-6);
    CHECK(std::abs(s.phi.imag()) < 1e-6);
    CHECK(std::abs(s.overlap_mag - 1.0) < 1e-6);
  }
}

TEST_CASE("sampled texture is within four standard errors") {
  const ssh::Params p{1.0, 0.5};
  const TextureSample exact = measure_texture(0.8, p, {10.0, 100}, ExactMode{});
  const TextureSample s = measure_texture(0.8, p, {10.0, 100}, SampledMode{100000, 17});
  CHECK(s.sampled);
  for (int c = 0; c < 2; ++c) {
    CHECK(std::abs(s.n[c].real() - exact.n[c].real()) <= 4.0 * s.n_std_error[c].real() + 1e-12);
    CHECK(std::abs(s.n[c].imag() - exact.n[c].imag()) <= 4.0 * s.n_std_error[c].imag() + 1e-12);
  }
}

TEST_CASE("measured winding on the standard grid") {
  const PrepConfig prep{10.0, 100};
  for (const ssh::Params& p : {ssh::Params{0.2, 0.5}, ssh::Params{1.0, 0.5}, ssh::Params{1.8, 0.5}}) {
    const auto samples = texture_sweep(p, 1000, prep, ExactMode{});
    const WindingResult w = measured_winding(samples);
    CHECK(std::abs(w.value - ssh::expected_winding(p).value()) <= 0.05);
    CHECK(std::abs(w.residual_im) < 1e-9);
    CHECK(w.N == 1000);
  }
}

TEST_CASE("measured winding is stable across grid sizes") {
  const ssh::Params p{0.2, 0.5, 1.0, ssh::Boundary::obc};
  for (int N : {50, 200, 1000}) {
    const WindingResult w = measured_winding(texture_sweep(p, N, {10.0, 100}, ExactMode{}));
    CHECK(std::round(2.0 * w.value) / 2.0 == 1.0);
  }
}

TEST_CASE("texture sweep does not depend on the job count") {
  const ssh::Params p{1.0, 0.5};
  const auto one = texture_sweep(p, 40, {10.0, 100}, SampledMode{2000, 9}, 1);
  const auto three = texture_sweep(p, 40, {10.0, 100}, SampledMode{2000, 9}, 3);
  REQUIRE(one.size() == three.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].k == three[i].k);
    for (int c = 0; c < 3; ++c) CHECK(one[i].n[c] == three[i].n[c]);
  }
}

TEST_CASE("ratio mode recovers phi without the overlap") {
  const ssh::Params p{1.0, 0.5};
  TextureOptions forced;
  forced.ep_threshold = 2.0;
  for (double k : {-2.0, 0.4, 1.7}) {
    const TextureSample normal = measure_texture(k, p, {10.0, 100}, ExactMode{});
    const TextureSample ratio = measure_texture(k, p, {10.0, 100}, ExactMode{}, forced);
    CHECK_FALSE(normal.ratio_mode);
    CHECK(ratio.ratio_mode);
    CHECK(std::isnan(ratio.n[0].real()));
    CHECK(std::abs(ratio.phi - normal.phi) < 1e-9);
  }
}

TEST_CASE("winding sweep rows and transitions") {
  SweepConfig cfg;
  cfg.base = {0.0, 0.5};
  cfg.t1_values = {0.2, 0.4, 0.5, 0.7, 1.0, 1.3, 1.6};
  cfg.N = 200;
  cfg.prep = {10.0, 100};
  const auto rows = winding_sweep(cfg);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0].w_measured.value() == doctest::Approx(1.0).epsilon(0.05));
  CHECK_FALSE(rows[2].error.empty());
  CHECK_FALSE(rows[2].w_expected.has_value());
  CHECK(rows[4].w_oracle.value() == 0.5);
  CHECK(rows[6].w_expected.value() == 0.0);
  const auto transitions = detect_transitions(rows);
  REQUIRE(transitions.size() == 2);
  CHECK(transitions[0] == doctest::Approx(0.55));
  CHECK(transitions[1] == doctest::Approx(1.45));
}

TEST_CASE("uniform t1 grid") {
  const auto g = uniform_t1_grid(0.01, 2.0, 0.02);
  CHECK(g.size() == 100);
  CHECK(g.front() == 0.01);
  CHECK(g.back() == doctest::Approx(1.99));
  CHECK_THROWS_AS(uniform_t1_grid(1.0, 0.0, 0.1), DomainError);
  CHECK_THROWS_AS(uniform_t1_grid(0.0, 1.0, 0.0), DomainError);
}

TEST_CASE("texture CSV and winding summary") {
  const ssh::Params p{1.0, 0.5};
  const PrepConfig prep{10.0, 100};
  const auto samples = texture_sweep(p, 16, prep, ExactMode{});
  std::ostringstream os;
  write_texture_csv(os, samples, "cfg");
  const auto lines = lines_of(os.str());
  REQUIRE(lines.size() == 18);
  CHECK(lines[0] == "# cfg");
  CHECK(lines[1].rfind("k,re_nx,", 0) == 0);
  CHECK(lines[1].find("overlap_mag,mode") != std::string::npos);
  CHECK(lines[2].substr(lines[2].rfind(',') + 1) == "exact");

  std::ostringstream sweep;
  write_sweep_csv(sweep, {{0.3, 1.0, 1.0, 1.0, ""}, {0.5, std::nullopt, std::nullopt, std::nullopt, "ep"}});
  const auto sl = lines_of(sweep.str());
  REQUIRE(sl.size() == 3);
  CHECK(sl[0] == "t1,w_measured,w_oracle,w_expected,error");

  const auto j = winding_summary(p, prep, ExactMode{}, measured_winding(samples), winding_oracle(p, 16), samples);
  CHECK(j["value"].get<double>() == doctest::Approx(0.5).epsilon(0.05));
  CHECK(j["oracle_value"].get<double>() == 0.5);
  CHECK(j["mode"] == "exact");
  CHECK(j["N"] == 16);
  CHECK(j.contains("parameters"));
  CHECK(j["ratio_mode_points"] == 0);
}

TEST_CASE("dilation route reproduces the direct texture") {
  const ssh::Params p{1.8, 0.5};
  TextureOptions options;
  options.dilation = DilationRoute{0.8, 0.23, 10000};
  PrepConfig prep{10.0, 100};
  prep.alpha = AlphaPolicy::sign();
  const TextureSample direct = measure_texture(kPi / 2, p, prep, ExactMode{});
  const TextureSample dilated = measure_texture(kPi / 2, p, prep, ExactMode{}, options);
  for (int c = 0; c < 3; ++c) CHECK(std::abs(direct.n[c] - dilated.n[c]) < 1e-3);
}
