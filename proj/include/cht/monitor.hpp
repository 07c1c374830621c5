#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cht/grid.hpp"
#include "cht/model.hpp"
#include "cht/stepper.hpp"

namespace cht {

struct TimeValue {
  double t = 0.0;
  double value = 0.0;
};
using TimeSeries = std::vector<TimeValue>;

/// One checked estimate. fail <=> worst_slack > tolerance * |bound|.
struct InvariantEntry {
  std::string check;
  bool pass = true;
  double worst_slack = 0.0;  // measured - bound, maximized over the run
  double t_worst = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  std::string details;
};

struct InvariantReport {
  std::vector<InvariantEntry> entries;
  bool all_pass() const;
  const InvariantEntry* find(std::string_view check) const;
};

enum class Verdict { Bounded, Growing, Inconclusive };
const char* to_string(Verdict verdict);

struct MonitorConfig {
  /// Exponents of the functional  int u^p + int |grad v|^(2q), paired
  /// elementwise with q_list.
  std::vector<double> p_list;
  std::vector<double> q_list;
  /// Exponents s for the ||grad v||_{L^s} series.
  std::vector<double> s_list;
  /// Exponent of the int u^theta series; 0 disables it.
  double theta = 0.0;
  double tolerance = 1e-8;
  double window_fraction = 0.25;
  double growth_tolerance = 0.01;

  bool operator==(const MonitorConfig&) const = default;
};

/// p_0, p_1, ..., p_{count-1} with p_k = 2 p_{k-1} + 1 - m.
std::vector<double> moser_ladder(double p0, double m, std::size_t count);

/// Pairs (2, 2) and (p_k, 2) for the first three ladder steps p_1..p_3 from
/// p_0 = max(2, 1.6 (m - 1)); s_list holds one admissible exponent below
/// n / (n - 1); theta = max(1, m/2) + 0.5.
MonitorConfig default_monitor_config(const DiffusionSpec& d, int analysis_n);

/// Throws DomainError unless all exponents exceed one (s >= 1), the p/q lists
/// have equal length and the window/tolerance values are in range.
void validate(const MonitorConfig& config);

/// max{|Omega|, int u0}.
double mass_star(const Field& u0, const Grid& g);

/// mass(t) <= m*(1 + tol) at every sample; for mu = 0 the stronger
/// |mass(t) - mass(0)| <= tol * mass(0) is checked instead.
InvariantEntry check_mass_bound(std::span<const TimeValue> mass, double m_star, double mu, double tol);

/// ||Lap w0||_inf + 4 ||grad sqrt(w0)||_inf^2 + ||w0||_inf / e with the
/// discrete operators. Throws DomainError unless w0 > 0.
double compute_K(const Field& w0, const Grid& g);

/// Worst cell of -Lap w - ||w0||_inf v - K for one state.
/// pass <=> slack <= tol (K + 1).
InvariantEntry check_neg_laplacian_w(const State& state, const Field& w0, double K, double tol, const Grid& g);

/// int u^p + int (|grad v|^2)^q.
double functional_y(const Field& u, const Field& v, double p, double q, const Grid& g);

/// ||grad v||_{L^s} with |grad v| from grad_mag_sq.
double grad_lp_norm(const Field& v, double s, const Grid& g);

/// Windowed growth test on the final window_fraction of the time span:
/// Bounded if its max <= (1 + growth_tol) * earlier max, Growing if it
/// exceeds twice the earlier max, Inconclusive otherwise or with fewer than
/// ten samples.
Verdict boundedness_verdict(std::span<const TimeValue> series, double window_fraction,
                            double growth_tol = 0.01);

struct NormSeries {
  std::vector<double> exponents;
  std::vector<TimeSeries> series;
  std::vector<std::string> warnings;
};

/// ||grad v(t)||_{L^s} over the stored snapshots of a trajectory. Exponents
/// outside [1, n/(n-1)) produce a warning and are still evaluated.
NormSeries semigroup_norm_series(const Trajectory& traj, std::span<const double> s_list, int analysis_n,
                                 const Grid& g);

/// Live evaluator of every monitored estimate; attach hook() to advance().
class Monitor {
 public:
  Monitor(MonitorConfig config, const InitialData& init, const ModelParams& params, const DiffusionSpec& diffusion,
          int analysis_n, const Grid& grid);

  SampleHook hook();
  void observe(const State& state, const SampleRecord& record);

  /// Folds the observed series and the stepper's structural statistics into
  /// pass/fail entries.
  InvariantReport report(const Trajectory& traj) const;

  struct NamedVerdict {
    std::string series;
    Verdict verdict;
  };
  std::vector<NamedVerdict> verdicts() const;

  const MonitorConfig& config() const { return config_; }
  double K() const { return K_; }
  double m_star() const { return m_star_; }
  const RegimeVerdict& regime() const { return regime_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  const TimeSeries& linf_u() const { return linf_u_; }
  const TimeSeries& mass() const { return mass_; }
  const std::vector<TimeSeries>& y_series() const { return y_; }
  const std::vector<TimeSeries>& gradv_series() const { return gradv_; }
  const TimeSeries& theta_series() const { return theta_; }
  const TimeSeries& neg_laplacian_slack() const { return bound_slack_; }
  std::string y_label(std::size_t k) const;
  std::string gradv_label(std::size_t k) const;
  std::string theta_label() const;

 private:
  MonitorConfig config_;
  Grid grid_;
  Field w0_;
  double w0_max_;
  double K_;
  double m_star_;
  double mu_;
  RegimeVerdict regime_;
  std::vector<std::string> warnings_;

  TimeSeries mass_, linf_u_, theta_, bound_slack_;
  std::vector<TimeSeries> y_, gradv_;
  InvariantEntry bound_worst_;
  double w_sample_excess_ = -std::numeric_limits<double>::infinity();
  double w_sample_excess_t_ = 0.0;
};

}  // namespace cht
