#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qge/genexp.hpp"
#include "qge/nh_evolution.hpp"
#include "qge/ssh_model.hpp"

namespace qge::experiment {

// Prepares the dual pair through the dilated Hermitian evolution instead of
// the direct nonunitary one. alpha is the one resolved by the preparation
// policy; T comes from PrepConfig.
struct DilationRoute {
  double eta0 = 0.8;
  double b = 0.23;
  int steps = 10000;
};

struct TextureOptions {
  // Below this |<psiL|psiR>| the texture is measured in ratio mode
  // (O = sigma_y, O' = sigma_x), which yields phi but not n.
  double ep_threshold = 1e-6;
  std::optional<DilationRoute> dilation;
};

struct TextureSample {
  double k = 0.0;
  std::array<cplx, 3> n{};  // NaN in ratio mode
  std::array<cplx, 3> n_std_error{};
  cplx phi;
  double overlap_mag = 0.0;
  bool sampled = false;
  bool ratio_mode = false;
  double fidelity_right = 0.0;
  double fidelity_left = 0.0;
};

// phi with tan(phi) = ny/nx, principal value Re(phi) in (-pi/2, pi/2].
cplx complex_angle(cplx nx, cplx ny);

ComplexMatrix model_hamiltonian(double k, const ssh::Params& p);

// Prepares the "+" band dual pair at k and measures the biorthogonal spin
// texture through the swap-test circuit.
TextureSample measure_texture(double k, const ssh::Params& p, const PrepConfig& prep,
                              const MeasurementMode& meas, const TextureOptions& options = {});

enum class WindingMethod { measured, oracle };

struct WindingResult {
  double value = 0.0;
  int N = 0;
  WindingMethod method = WindingMethod::measured;
  double residual_im = 0.0;
  double half_integer_distance = 0.0;  // |value - nearest multiple of 1/2|
};

// k_j = -pi + 2 pi j / N, j = 0..N-1.
std::vector<double> k_grid(int N);

// Sum of Re(phi) increments wrapped into (-pi/2, pi/2] around the closed
// loop, divided by 2 pi.
WindingResult winding_from_phases(const std::vector<cplx>& phis);

// (wind(dx + i dy) - wind(dx - i dy)) / 2 accumulated directly from the field.
WindingResult winding_oracle(const ssh::Params& p, int N);

// Textures on the k grid, ordered by k. jobs > 1 spreads k-points over
// threads; results do not depend on the job count.
std::vector<TextureSample> texture_sweep(const ssh::Params& p, int N, const PrepConfig& prep,
                                         const MeasurementMode& meas, int jobs = 1,
                                         const TextureOptions& options = {});

WindingResult measured_winding(const std::vector<TextureSample>& samples);

struct SweepConfig {
  ssh::Params base;  // t1 is overridden per row
  std::vector<double> t1_values;
  int N = 1000;
  PrepConfig prep;
  MeasurementMode meas = ExactMode{};
  int jobs = 1;
  TextureOptions options;
};

struct SweepRow {
  double t1 = 0.0;
  std::optional<double> w_measured;
  std::optional<double> w_oracle;
  std::optional<double> w_expected;
  std::string error;
};

std::vector<SweepRow> winding_sweep(const SweepConfig& config);

// Midpoints between consecutive rows whose rounded measured windings differ.
std::vector<double> detect_transitions(const std::vector<SweepRow>& rows);

std::vector<double> uniform_t1_grid(double start, double stop, double spacing);

void write_texture_csv(std::ostream& os, const std::vector<TextureSample>& samples,
                       const std::string& header_comment = {});
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     const std::string& header_comment = {});

nlohmann::json winding_summary(const ssh::Params& p, const PrepConfig& prep, const MeasurementMode& meas,
                               const WindingResult& measured, const WindingResult& oracle,
                               const std::vector<TextureSample>& samples);

}  // namespace qge::experiment
