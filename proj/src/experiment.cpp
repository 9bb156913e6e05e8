#include "qge/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "qge/dilation.hpp"
#include "qge/error.hpp"

namespace qge::experiment {

namespace {

constexpr double kPi = std::numbers::pi;

const char* mode_name(const MeasurementMode& meas) {
  return std::holds_alternative<ExactMode>(meas) ? "exact" : "sampled";
}

MeasurementMode stream_mode(const MeasurementMode& meas, std::uint64_t stream) {
  if (std::holds_alternative<ExactMode>(meas)) return meas;
  SampledMode s = std::get<SampledMode>(meas);
  s.seed = derive_seed(s.seed, stream);
  return s;
}

// x - pi * round(x / pi), landing in (-pi/2, pi/2].
double wrap_half_pi(double x) {
  double w = x - kPi * std::round(x / kPi);
  if (w <= -kPi / 2) w += kPi;
  if (w > kPi / 2) w -= kPi;
  return w;
}

double wrap_pi(double x) {
  double w = std::remainder(x, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

double half_integer_distance(double value) { return std::abs(value - 0.5 * std::round(2.0 * value)); }

}  // namespace

cplx complex_angle(cplx nx, cplx ny) {
  // e^{2 i phi} = (nx + i ny) / (nx - i ny)
  const cplx num = nx + kI * ny;
  const cplx den = nx - kI * ny;
  if (std::abs(num) == 0.0 || std::abs(den) == 0.0)
    throw ExceptionalPointError("complex_angle: nx +- i ny vanishes");
  return -0.5 * kI * std::log(num / den);
}

ComplexMatrix model_hamiltonian(double k, const ssh::Params& p) {
  return ssh::d_for(k, p).hamiltonian();
}

TextureSample measure_texture(double k, const ssh::Params& p, const PrepConfig& prep,
                              const MeasurementMode& meas, const TextureOptions& options) {
  if (!(k >= -kPi - 1e-12 && k <= kPi + 1e-12))
    throw DomainError("measure_texture: k must lie in [-pi, pi]");
  p.validate();
  const ssh::DVector d = ssh::d_for(k, p);

  PrepConfig config = prep;
  config.target = ssh::band_energy(d);
  PreparedPair prepared = prepare_dual_pair(d.hamiltonian(), config);
  if (options.dilation) {
    DilationParams dp;
    dp.eta0 = options.dilation->eta0;
    dp.b = options.dilation->b;
    dp.steps = options.dilation->steps;
    dp.T = prep.T;
    dp.alpha = prepared.alpha;
    const StateVector start = StateVector::basis(1, 0);
    const ComplexMatrix H = d.hamiltonian();
    prepared.pair.psiR = run_dilated(start, dp, build_schedule(H, dp, Branch::right)).states.back();
    prepared.pair.psiL = run_dilated(start, dp, build_schedule(H, dp, Branch::left)).states.back();
    prepared.pair.overlap = inner(prepared.pair.psiL, prepared.pair.psiR);
    prepared.right.fidelities.back() = std::norm(inner(prepared.exact_right.normalized(), prepared.pair.psiR));
    prepared.left.fidelities.back() = std::norm(inner(prepared.exact_left.normalized(), prepared.pair.psiL));
  }

  TextureSample out;
  out.k = k;
  out.sampled = std::holds_alternative<SampledMode>(meas);
  out.overlap_mag = std::abs(prepared.pair.overlap);
  out.fidelity_right = prepared.right.fidelities.back();
  out.fidelity_left = prepared.left.fidelities.back();

  const ComplexMatrix sigma[3] = {pauli::X(), pauli::Y(), pauli::Z()};
  bool need_ratio = out.overlap_mag < options.ep_threshold;
  if (!need_ratio) {
    try {
      for (int c = 0; c < 3; ++c) {
        GenExpRequest req{prepared.pair.psiL, prepared.pair.psiR, {sigma[c]}, {pauli::I()},
                          stream_mode(meas, static_cast<std::uint64_t>(c))};
        const GenExpResult r = generalized_expectation(req);
        out.n[c] = r.value;
        out.n_std_error[c] = r.std_error;
      }
      out.phi = complex_angle(out.n[0], out.n[1]);
    } catch (const OrthogonalityError&) {
      need_ratio = true;
    }
  }
  if (need_ratio) {
    // tan(phi) = <psiL|sigma_y|psiR> / <psiL|sigma_x|psiR> needs no overlap.
    GenExpRequest req{prepared.pair.psiL, prepared.pair.psiR, {pauli::Y()}, {pauli::X()},
                      stream_mode(meas, 3)};
    const GenExpResult r = generalized_expectation(req);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.n = {cplx(nan, nan), cplx(nan, nan), cplx(nan, nan)};
    out.n_std_error = {cplx(0.0), r.std_error, cplx(0.0)};
    out.phi = complex_angle(1.0, r.value);
    out.ratio_mode = true;
  }
  return out;
}

std::vector<double> k_grid(int N) {
  std::vector<double> ks(static_cast<std::size_t>(std::max(N, 0)));
  for (int j = 0; j < N; ++j) ks[j] = -kPi + 2.0 * kPi * j / N;
  return ks;
}

WindingResult winding_from_phases(const std::vector<cplx>& phis) {
  if (phis.size() < 16) throw DomainError("winding_from_phases: need at least 16 samples");
  const std::size_t n = phis.size();
  double total = 0.0, residual_im = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const cplx& a = phis[j];
    const cplx& b = phis[(j + 1) % n];
    const double step = wrap_half_pi(b.real() - a.real());
    if (std::abs(std::abs(step) - kPi / 2) <= 1e-12) {
      std::ostringstream os;
      os << "winding_from_phases: phase step " << j << " is +-pi/2; increase N";
      throw AmbiguousBranchError(os.str());
    }
    total += step;
    residual_im += b.imag() - a.imag();
  }
  WindingResult r;
  r.value = total / (2.0 * kPi);
  r.N = static_cast<int>(n);
  r.method = WindingMethod::measured;
  r.residual_im = residual_im;
  r.half_integer_distance = half_integer_distance(r.value);
  return r;
}

WindingResult winding_oracle(const ssh::Params& p, int N) {
  if (N < 3) throw DomainError("winding_oracle: need at least 3 samples");
  p.validate();
  const std::vector<double> ks = k_grid(N);
  std::vector<cplx> q_plus, q_minus;
  for (double k : ks) {
    const ssh::DVector d = ssh::d_for(k, p);
    q_plus.push_back(d.dx + kI * d.dy);
    q_minus.push_back(d.dx - kI * d.dy);
    if (std::abs(q_plus.back()) < 1e-12 || std::abs(q_minus.back()) < 1e-12) {
      std::ostringstream os;
      os << "winding_oracle: dx +- i dy vanishes at k = " << k;
      throw ExceptionalPointError(os.str());
    }
  }
  auto wind = [N](const std::vector<cplx>& q) {
    double total = 0.0;
    for (int j = 0; j < N; ++j) total += wrap_pi(std::arg(q[(j + 1) % N]) - std::arg(q[j]));
    return total / (2.0 * kPi);
  };
  WindingResult r;
  r.value = 0.5 * (wind(q_plus) - wind(q_minus));
  const double rounded = 0.5 * std::round(2.0 * r.value);
  if (std::abs(r.value - rounded) <= 1e-9) r.value = rounded;
  r.N = N;
  r.method = WindingMethod::oracle;
  r.half_integer_distance = half_integer_distance(r.value);
  return r;
}

std::vector<TextureSample> texture_sweep(const ssh::Params& p, int N, const PrepConfig& prep,
                                         const MeasurementMode& meas, int jobs,
                                         const TextureOptions& options) {
  const std::vector<double> ks = k_grid(N);
  std::vector<TextureSample> samples(ks.size());
  std::vector<std::exception_ptr> errors(ks.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < ks.size(); i = next++) {
      try {
        samples[i] = measure_texture(ks[i], p, prep, stream_mode(meas, 100 + i), options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(ks.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return samples;
}

WindingResult measured_winding(const std::vector<TextureSample>& samples) {
  std::vector<cplx> phis;
  phis.reserve(samples.size());
  for (const auto& s : samples) phis.push_back(s.phi);
  return winding_from_phases(phis);
}

std::vector<SweepRow> winding_sweep(const SweepConfig& config) {
  std::vector<SweepRow> rows;
  for (double t1 : config.t1_values) {
    SweepRow row;
    row.t1 = t1;
    ssh::Params p = config.base;
    p.t1 = t1;
    try {
      row.w_expected = ssh::expected_winding(p).value();
    } catch (const Error& e) {
      row.error = e.what();
    }
    try {
      row.w_oracle = winding_oracle(p, config.N).value;
      const auto samples = texture_sweep(p, config.N, config.prep, config.meas, config.jobs, config.options);
      row.w_measured = measured_winding(samples).value;
    } catch (const Error& e) {
      if (!row.error.empty()) row.error += "; ";
      row.error += e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> detect_transitions(const std::vector<SweepRow>& rows) {
  std::vector<double> out;
  const SweepRow* prev = nullptr;
  for (const auto& row : rows) {
    if (!row.w_measured) continue;
    if (prev && std::round(2.0 * *prev->w_measured) != std::round(2.0 * *row.w_measured))
      out.push_back(0.5 * (prev->t1 + row.t1));
    prev = &row;
  }
  return out;
}

std::vector<double> uniform_t1_grid(double start, double stop, double spacing) {
  if (!(spacing > 0.0) || stop < start) throw DomainError("uniform_t1_grid: bad range");
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((stop - start) / spacing + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(start + spacing * static_cast<double>(i));
  return out;
}

void write_texture_csv(std::ostream& os, const std::vector<TextureSample>& samples,
                       const std::string& header_comment) {
  if (!header_comment.empty()) os << "# " << header_comment << '\n';
  os << "k,re_nx,im_nx,re_ny,im_ny,re_nz,im_nz,re_phi,im_phi,overlap_mag,mode\n"
     << std::setprecision(17);
  for (const auto& s : samples) {
    os << s.k;
    for (const auto& c : s.n) os << ',' << c.real() << ',' << c.imag();
    os << ',' << s.phi.real() << ',' << s.phi.imag() << ',' << s.overlap_mag << ','
       << (s.sampled ? "sampled" : "exact") << (s.ratio_mode ? "-ratio" : "") << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     const std::string& header_comment) {
  if (!header_comment.empty()) os << "# " << header_comment << '\n';
  os << "t1,w_measured,w_oracle,w_expected,error\n" << std::setprecision(17);
  auto opt = [&os](const std::optional<double>& v) {
    if (v) os << *v;
  };
  for (const auto& r : rows) {
    os << r.t1 << ',';
    opt(r.w_measured);
    os << ',';
    opt(r.w_oracle);
    os << ',';
    opt(r.w_expected);
    std::string err = r.error;
    for (char& c : err)
      if (c == ',' || c == '\n') c = ';';
    os << ',' << err << '\n';
  }
}

nlohmann::json winding_summary(const ssh::Params& p, const PrepConfig& prep, const MeasurementMode& meas,
                               const WindingResult& measured, const WindingResult& oracle,
                               const std::vector<TextureSample>& samples) {
  nlohmann::json j;
  j["parameters"] = {{"t1", p.t1},
                     {"delta", p.delta},
                     {"t2", p.t2},
                     {"bc", p.bc == ssh::Boundary::pbc ? "pbc" : "obc"}};
  j["N"] = measured.N;
  j["T"] = prep.T;
  j["mode"] = mode_name(meas);
  if (const auto* s = std::get_if<SampledMode>(&meas)) {
    j["shots"] = s->shots;
    j["seed"] = s->seed;
  }
  j["value"] = measured.value;
  j["oracle_value"] = oracle.value;
  try {
    j["expected_value"] = ssh::expected_winding(p).value();
  } catch (const Error&) {
    j["expected_value"] = nullptr;
  }
  std::size_t ratio_points = 0;
  double min_overlap = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    ratio_points += s.ratio_mode ? 1 : 0;
    min_overlap = std::min(min_overlap, s.overlap_mag);
  }
  j["residuals"] = {{"half_integer_distance", measured.half_integer_distance},
                    {"residual_im", measured.residual_im},
                    {"oracle_difference", std::abs(measured.value - oracle.value)}};
  j["ratio_mode_points"] = ratio_points;
  j["min_overlap"] = samples.empty() ? 0.0 : min_overlap;
  return j;
}

}  // namespace qge::experiment
