#include "qge/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include "qge/dilation.hpp"
#include "qge/error.hpp"
#include "qge/experiment.hpp"
#include "qge/genexp.hpp"
#include "qge/nh_evolution.hpp"
#include "qge/ssh_model.hpp"

namespace qge::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelOpts {
  std::string bc = "pbc";
  double t1 = 0.2;
  double delta = 0.5;
  double t2 = 1.0;
};

struct PrepOpts {
  double T = 10.0;
  int steps = 100;
  std::string alpha = "auto";
};

struct MeasOpts {
  std::uint64_t shots = 0;  // 0 selects exact mode
  std::uint64_t seed = 0;
};

struct SweepOpts {
  int N = 1000;
  int jobs = 1;
  double ep_threshold = 1e-6;
  bool via_dilation = false;
  double eta0 = 0.8;
  double b = 0.23;
  int dilation_steps = 10000;
};

struct Options {
  std::string out_dir;
  ModelOpts model;
  PrepOpts prep;
  MeasOpts meas;
  SweepOpts sweep;
  double k = std::numbers::pi / 2;
  int band = 1;
  double t1_start = 0.01, t1_stop = 2.0, t1_step = 0.02;
  std::string branch = "right";
  std::string dilation_alpha = "sign";
  std::string psi1, psi2, obs, obs_prime;
};

void add_model(CLI::App* sub, ModelOpts& m) {
  sub->add_option("--bc", m.bc, "Boundary condition")->check(CLI::IsMember({"pbc", "obc"}));
  sub->add_option("--t1", m.t1, "Intra-cell hopping");
  sub->add_option("--delta", m.delta, "Nonreciprocity");
  sub->add_option("--t2", m.t2, "Inter-cell hopping (energy unit)");
}

void add_prep(CLI::App* sub, PrepOpts& p) {
  sub->add_option("--T", p.T, "Evolution time");
  sub->add_option("--steps", p.steps, "Stored time steps of the direct evolution");
  sub->add_option("--alpha", p.alpha, "auto | sign | <re>,<im> | phase:<radians>");
}

void add_meas(CLI::App* sub, MeasOpts& m) {
  sub->add_option("--shots", m.shots, "Shots per circuit; 0 for exact expectations");
  sub->add_option("--seed", m.seed, "Base RNG seed");
}

void add_sweep(CLI::App* sub, SweepOpts& s) {
  sub->add_option("--N", s.N, "Number of k points");
  sub->add_option("-j,--jobs", s.jobs, "Worker threads for k points");
  sub->add_option("--ep-threshold", s.ep_threshold, "Overlap below which ratio mode is used");
  sub->add_flag("--via-dilation", s.via_dilation, "Prepare dual pairs through the dilated evolution");
  sub->add_option("--eta0", s.eta0, "Dilation eta0 (with --via-dilation)");
  sub->add_option("--b", s.b, "Dilation offset b (with --via-dilation)");
  sub->add_option("--dilation-steps", s.dilation_steps, "Dilation time steps (with --via-dilation)");
}

void add_output(CLI::App* sub, Options& o) {
  sub->add_option("-o,--out", o.out_dir, std::string("Output directory (default $") + kOutputDirEnv + " or .)");
}

// "auto", "sign", "<re>,<im>", "phase:<radians>" or a real number.
AlphaPolicy parse_alpha(const std::string& text) {
  if (text == "auto") return AlphaPolicy::automatic();
  if (text == "sign") return AlphaPolicy::sign();
  try {
    cplx value;
    if (text.rfind("phase:", 0) == 0) {
      value = std::polar(1.0, std::stod(text.substr(6)));
    } else if (auto comma = text.find(','); comma != std::string::npos) {
      value = {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    } else {
      value = std::stod(text);
    }
    if (std::abs(std::abs(value) - 1.0) > 1e-9) throw UsageError("--alpha must have unit modulus");
    return AlphaPolicy::fixed(value / std::abs(value));
  } catch (const std::logic_error&) {
    throw UsageError("cannot parse --alpha '" + text + "'");
  }
}

ssh::Params model_params(const ModelOpts& m) {
  ssh::Params p;
  p.t1 = m.t1;
  p.delta = m.delta;
  p.t2 = m.t2;
  p.bc = m.bc == "obc" ? ssh::Boundary::obc : ssh::Boundary::pbc;
  try {
    p.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return p;
}

PrepConfig prep_config(const PrepOpts& o) {
  if (!(o.T > 0.0)) throw UsageError("--T must be positive");
  if (o.steps < 1) throw UsageError("--steps must be >= 1");
  PrepConfig c;
  c.T = o.T;
  c.steps = o.steps;
  c.alpha = parse_alpha(o.alpha);
  return c;
}

MeasurementMode meas_mode(const MeasOpts& o) {
  if (o.shots == 0) return ExactMode{};
  if (o.shots < 2) throw UsageError("--shots must be 0 or >= 2");
  return SampledMode{o.shots, o.seed};
}

experiment::TextureOptions texture_options(const SweepOpts& s, double T) {
  if (s.jobs < 1) throw UsageError("--jobs must be >= 1");
  if (!(s.ep_threshold >= 0.0)) throw UsageError("--ep-threshold must be non-negative");
  experiment::TextureOptions opts;
  opts.ep_threshold = s.ep_threshold;
  if (s.via_dilation) {
    DilationParams dp;
    dp.eta0 = s.eta0;
    dp.b = s.b;
    dp.steps = s.dilation_steps;
    dp.T = T;
    try {
      dp.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    opts.dilation = experiment::DilationRoute{s.eta0, s.b, s.dilation_steps};
  }
  return opts;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
  return s;
}

// One line with every option of the subcommand as key=value.
std::string resolved_config(const CLI::App* sub) {
  std::ostringstream os;
  os << "subcommand=" << sub->get_name();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "h" || name == "out" || name == "o") continue;
    std::string value = opt->count() > 0 ? join(opt->results()) : opt->get_default_str();
    if (value.empty() && opt->get_expected_max() == 0) value = "false";
    os << ' ' << name << '=' << value;
  }
  return os.str();
}

fs::path output_dir(const Options& o) {
  fs::path dir = o.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv(kOutputDirEnv);
    dir = env && *env ? env : ".";
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  return f;
}

std::string fmt_number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  std::ostringstream os;
  os << std::setprecision(15) << v;
  std::string s = os.str();
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

int cmd_texture(const CLI::App* sub, const Options& o, std::ostream& out) {
  const ssh::Params p = model_params(o.model);
  const PrepConfig prep = prep_config(o.prep);
  const MeasurementMode meas = meas_mode(o.meas);
  const auto topts = texture_options(o.sweep, prep.T);
  if (o.sweep.N < 1) throw UsageError("--N must be >= 1");
  const fs::path dir = output_dir(o);

  const auto samples = experiment::texture_sweep(p, o.sweep.N, prep, meas, o.sweep.jobs, topts);
  auto f = open_out(dir / "texture.csv");
  experiment::write_texture_csv(f, samples, resolved_config(sub));
  out << (dir / "texture.csv").string() << '\n';
  return ok;
}

int cmd_winding(const CLI::App* sub, const Options& o, std::ostream& out) {
  const ssh::Params p = model_params(o.model);
  const PrepConfig prep = prep_config(o.prep);
  const MeasurementMode meas = meas_mode(o.meas);
  const auto topts = texture_options(o.sweep, prep.T);
  if (o.sweep.N < 16) throw UsageError("--N must be >= 16");
  const fs::path dir = output_dir(o);

  const auto samples = experiment::texture_sweep(p, o.sweep.N, prep, meas, o.sweep.jobs, topts);
  const auto measured = experiment::measured_winding(samples);
  const auto oracle = experiment::winding_oracle(p, o.sweep.N);
  json summary = experiment::winding_summary(p, prep, meas, measured, oracle, samples);
  summary["config"] = resolved_config(sub);

  auto tf = open_out(dir / "winding_texture.csv");
  experiment::write_texture_csv(tf, samples, resolved_config(sub));
  auto jf = open_out(dir / "winding.json");
  jf << summary.dump(2) << '\n';
  out << summary.dump(2) << '\n';
  return ok;
}

int cmd_phase_diagram(const CLI::App* sub, const Options& o, std::ostream& out) {
  experiment::SweepConfig config;
  config.base = model_params(o.model);
  config.prep = prep_config(o.prep);
  config.meas = meas_mode(o.meas);
  config.options = texture_options(o.sweep, config.prep.T);
  config.N = o.sweep.N;
  config.jobs = o.sweep.jobs;
  if (config.N < 16) throw UsageError("--N must be >= 16");
  try {
    config.t1_values = experiment::uniform_t1_grid(o.t1_start, o.t1_stop, o.t1_step);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const fs::path dir = output_dir(o);

  const auto rows = experiment::winding_sweep(config);
  auto f = open_out(dir / "phase_diagram.csv");
  experiment::write_sweep_csv(f, rows, resolved_config(sub));
  json j;
  j["rows"] = rows.size();
  j["transitions"] = experiment::detect_transitions(rows);
  j["failed_rows"] = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.error.empty(); });
  j["file"] = (dir / "phase_diagram.csv").string();
  out << j.dump(2) << '\n';
  return ok;
}

int cmd_prepare(const CLI::App* sub, const Options& o, std::ostream& out) {
  const ssh::Params p = model_params(o.model);
  PrepConfig prep = prep_config(o.prep);
  if (o.band != 1 && o.band != -1) throw UsageError("--band must be +1 or -1");
  const fs::path dir = output_dir(o);

  const ssh::DVector d = ssh::d_for(o.k, p);
  prep.target = static_cast<double>(o.band) * ssh::band_energy(d);
  const PreparedPair pp = prepare_dual_pair(d.hamiltonian(), prep);
  auto rf = open_out(dir / "prepare_right.csv");
  write_trajectory_csv(rf, pp.right, resolved_config(sub) + " branch=right");
  auto lf = open_out(dir / "prepare_left.csv");
  write_trajectory_csv(lf, pp.left, resolved_config(sub) + " branch=left");

  json j;
  j["eigenvalue"] = {pp.pair.eigenvalue.real(), pp.pair.eigenvalue.imag()};
  j["alpha"] = {pp.alpha.real(), pp.alpha.imag()};
  j["dominance"] = pp.dominance;
  j["fidelity_right"] = pp.right.fidelities.back();
  j["fidelity_left"] = pp.left.fidelities.back();
  j["overlap"] = {pp.pair.overlap.real(), pp.pair.overlap.imag()};
  out << j.dump(2) << '\n';
  return ok;
}

int cmd_dilation_check(const CLI::App* sub, const Options& o, std::ostream& out) {
  const ssh::Params p = model_params(o.model);
  DilationParams dp;
  dp.eta0 = o.sweep.eta0;
  dp.b = o.sweep.b;
  dp.T = o.prep.T;
  dp.steps = o.sweep.dilation_steps;
  const Branch branch = o.branch == "left" ? Branch::left : Branch::right;

  const ssh::DVector d = ssh::d_for(o.k, p);
  const ComplexMatrix H = d.hamiltonian();
  std::vector<cplx> values;
  for (const auto& pair : eig(H).pairs) values.push_back(pair.value);
  const cplx energy = ssh::band_energy(d);
  std::size_t target = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (std::abs(values[i] - energy) < std::abs(values[target] - energy)) target = i;
  dp.alpha = resolve_alpha(values, target, parse_alpha(o.dilation_alpha));
  try {
    dp.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const fs::path dir = output_dir(o);

  const StateVector psi0 = StateVector::basis(1, 0);
  const DilationSchedule schedule = build_schedule(H, dp, branch);
  const DilatedTrajectory dil = run_dilated(psi0, dp, schedule);
  const EvolutionResult direct = evolve(schedule.h_effective, psi0, dp.T, dp.steps);

  auto sf = open_out(dir / "dilation_schedule.csv");
  write_schedule_csv(sf, schedule, resolved_config(sub));
  auto cf = open_out(dir / "dilation_comparison.csv");
  cf << "# " << resolved_config(sub) << '\n'
     << "t,pop0_dilated,pop0_direct,abs_diff,success_prob\n"
     << std::setprecision(17);
  double max_diff = 0.0;
  for (std::size_t j = 0; j < dil.times.size(); ++j) {
    const double pd = std::norm(dil.states[j][0]);
    const double pe = direct.populations[j][0];
    max_diff = std::max(max_diff, std::abs(pd - pe));
    cf << dil.times[j] << ',' << pd << ',' << pe << ',' << std::abs(pd - pe) << ','
       << dil.success_probs[j] << '\n';
  }
  double min_eig = std::numeric_limits<double>::infinity();
  for (const auto& pt : schedule.grid) min_eig = std::min(min_eig, pt.min_eig_m_minus_i);

  json j;
  j["alpha"] = {dp.alpha.real(), dp.alpha.imag()};
  j["max_population_difference"] = max_diff;
  j["max_hermiticity_residual"] = schedule.max_hermiticity_residual;
  j["relative_hermiticity_residual"] = schedule.max_hermiticity_residual / schedule.max_dilated_norm;
  j["min_eig_M_minus_I"] = min_eig;
  j["min_success_prob"] = *std::min_element(dil.success_probs.begin(), dil.success_probs.end());
  out << j.dump(2) << '\n';
  return ok;
}

int cmd_genexp(const Options& o, std::ostream& out) {
  GenExpRequest req{load_state(o.psi1), load_state(o.psi2), load_observables(o.obs), {}, meas_mode(o.meas)};
  if (!o.obs_prime.empty()) req.Oprime = load_observables(o.obs_prime);
  const GenExpResult r = generalized_expectation(req);
  out << fmt_number(r.value.real()) << ' ' << fmt_number(r.value.imag());
  if (o.meas.shots > 0) out << ' ' << fmt_number(r.std_error.real()) << ' ' << fmt_number(r.std_error.imag());
  out << '\n';
  return ok;
}

void error_record(std::ostream& err, const std::string& kind, const std::string& message, int code) {
  json j{{"error", kind}, {"message", message}, {"exit_code", code}};
  err << j.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized expectation circuits and non-Hermitian winding numbers"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "INI file with one section per subcommand");
  app.require_subcommand(1);

  Options o;

  auto* texture = app.add_subcommand("texture", "Spin texture on the k grid -> texture.csv");
  auto* winding = app.add_subcommand("winding", "Winding number -> winding.json + winding_texture.csv");
  auto* phase = app.add_subcommand("phase-diagram", "Winding over a t1 grid -> phase_diagram.csv");
  auto* prepare = app.add_subcommand("prepare", "Dual-pair preparation trajectories");
  auto* dcheck = app.add_subcommand("dilation-check", "Dilated vs direct evolution");
  auto* genexp = app.add_subcommand("genexp", "Generalized expectation from state and observable files");

  for (auto* sub : {texture, winding, phase, prepare, dcheck}) {
    add_model(sub, o.model);
    add_output(sub, o);
  }
  for (auto* sub : {texture, winding, phase, prepare}) add_prep(sub, o.prep);
  for (auto* sub : {texture, winding, phase}) {
    add_meas(sub, o.meas);
    add_sweep(sub, o.sweep);
  }
  phase->add_option("--t1-start", o.t1_start, "First t1");
  phase->add_option("--t1-stop", o.t1_stop, "Last t1 (inclusive)");
  phase->add_option("--t1-step", o.t1_step, "t1 spacing");
  for (auto* sub : {prepare, dcheck}) sub->add_option("--k", o.k, "Momentum");
  prepare->add_option("--band", o.band, "+1 or -1");

  dcheck->add_option("--T", o.prep.T, "Evolution time");
  dcheck->add_option("--steps", o.sweep.dilation_steps, "Time steps (dt = T / steps)");
  dcheck->add_option("--alpha", o.dilation_alpha, "sign | auto | <re>,<im> | phase:<radians>");
  dcheck->add_option("--eta0", o.sweep.eta0, "Initial eta");
  dcheck->add_option("--b", o.sweep.b, "Imaginary energy offset");
  dcheck->add_option("--branch", o.branch, "right | left")->check(CLI::IsMember({"right", "left"}));

  genexp->add_option("--psi1", o.psi1, "State file for psi1")->required();
  genexp->add_option("--psi2", o.psi2, "State file for psi2")->required();
  genexp->add_option("--O", o.obs, "Observable file for O")->required();
  genexp->add_option("--Oprime", o.obs_prime, "Observable file for O' (default identity)");
  add_meas(genexp, o.meas);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    error_record(err, "usage", e.what(), usage);
    return usage;
  }

  try {
    if (texture->parsed()) return cmd_texture(texture, o, out);
    if (winding->parsed()) return cmd_winding(winding, o, out);
    if (phase->parsed()) return cmd_phase_diagram(phase, o, out);
    if (prepare->parsed()) return cmd_prepare(prepare, o, out);
    if (dcheck->parsed()) return cmd_dilation_check(dcheck, o, out);
    if (genexp->parsed()) return cmd_genexp(o, out);
  } catch (const UsageError& e) {
    error_record(err, "usage", e.what(), usage);
    return usage;
  } catch (const IoError& e) {
    error_record(err, to_string(e.kind()), e.what(), usage);
    return usage;
  } catch (const Error& e) {
    error_record(err, to_string(e.kind()), e.what(), physics);
    return physics;
  } catch (const std::exception& e) {
    error_record(err, "internal", e.what(), physics);
    return physics;
  }
  error_record(err, "usage", "no subcommand", usage);
  return usage;
}

int run(const std::vector<std::string>& args) { return run(args, std::cout, std::cerr); }

}  // namespace qge::cli
