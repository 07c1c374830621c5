#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cht/model.hpp"
#include "cht/monitor.hpp"
#include "cht/stepper.hpp"

namespace cht {

/// Parse or validation failure tied to a location in the config text.
/// line is 0 when the problem is a missing key or section.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string section, std::string key, const std::string& reason);
  int line() const noexcept { return line_; }
  const std::string& section() const noexcept { return section_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string section_;
  std::string key_;
};

enum class PresetKind { ConstantSteady, GaussianBump, PerturbedEquilibrium };
const char* to_string(PresetKind kind);
std::optional<PresetKind> parse_preset_kind(std::string_view text);

/// Initial-data preset and all of its parameters. Only the parameters of the
/// selected preset are used; the rest keep their defaults.
struct PresetSpec {
  PresetKind kind = PresetKind::GaussianBump;

  // constant_steady: (1, 1, w0)
  double w0 = 1e-12;

  // gaussian_bump: u0 = amplitude * exp(-|x - center|^2 / (2 width^2)),
  // rescaled to the given integral when mass > 0; v0 = 0;
  // w0 = 1 + w0_perturbation * cos(pi x / L1) cos(pi y / L2)
  double amplitude = 1.0;
  double width = 0.1;
  double center_x = 0.5;
  double center_y = 0.5;
  double mass = 0.0;
  double w0_perturbation = 0.0;

  // perturbed_equilibrium: u0 = 1 + rho r, v0 = 1 + rho r,
  // w0 = w_level (1 + rho r), r uniform on [-1, 1], independent per cell
  double rho = 0.1;
  std::uint64_t seed = 1;
  double w_level = 1.0;

  bool operator==(const PresetSpec&) const = default;
};

/// Monitor settings as written in the file. Absent lists fall back to
/// default_monitor_config for the run's diffusion.
struct MonitorOverrides {
  std::optional<std::vector<double>> p_list;
  std::optional<std::vector<double>> q_list;
  std::optional<std::vector<double>> s_list;
  std::optional<double> theta;
  double tolerance = 1e-8;
  double window_fraction = 0.25;
  double growth_tolerance = 0.01;

  bool operator==(const MonitorOverrides&) const = default;
};

struct RunConfig {
  int dim = 2;
  std::array<double, 2> extents{1.0, 1.0};
  std::array<int, 2> cells{64, 64};
  int analysis_n = 2;
  DiffusionSpec diffusion;
  ModelParams params;
  StepControls controls;
  PresetSpec initial;
  MonitorOverrides monitor;
  std::string output_directory = "chtsim_out";

  bool operator==(const RunConfig&) const = default;
};

struct ParsedConfig {
  RunConfig config;
  std::vector<std::string> warnings;
};

/// INI-style text:
///
///     # comment
///     [section]
///     key = value
///
/// Required: [grid] dim, cells; [diffusion] m; [params] chi, xi, mu.
/// Everything else has the defaults of RunConfig. Unknown sections or keys,
/// duplicates, malformed numbers and out-of-range values throw ConfigError.
/// Regime, CFL and exponent concerns are returned as warnings.
ParsedConfig parse_config(std::string_view text);

/// Reads and parses a file. Unreadable files throw IoError.
ParsedConfig load_config(const std::string& path);

/// Canonical text for a config; parse_config(serialize_config(c)).config == c.
std::string serialize_config(const RunConfig& config);

Grid make_grid(const RunConfig& config);
MonitorConfig resolve_monitor(const RunConfig& config);

/// Grid, preset initial data, parameters and controls of a config.
Simulation make_simulation(const RunConfig& config);

}  // namespace cht
