#include "cht/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "cht/errors.hpp"
#include "cht/operators.hpp"

namespace cht {
namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double admissible_s_limit(int n) { return static_cast<double>(n) / (n - 1); }

}  // namespace

bool InvariantReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const InvariantEntry& e) { return e.pass; });
}

const InvariantEntry* InvariantReport::find(std::string_view check) const {
  for (const auto& e : entries)
    if (e.check == check) return &e;
  return nullptr;
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Bounded: return "Bounded";
    case Verdict::Growing: return "Growing";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::vector<double> moser_ladder(double p0, double m, std::size_t count) {
  std::vector<double> ladder;
  ladder.reserve(count);
  double p = p0;
  for (std::size_t k = 0; k < count; ++k) {
    ladder.push_back(p);
    p = 2.0 * p + 1.0 - m;
  }
  return ladder;
}

MonitorConfig default_monitor_config(const DiffusionSpec& d, int analysis_n) {
  MonitorConfig cfg;
  cfg.p_list = {2.0};
  cfg.q_list = {2.0};
  const double p0 = std::max(2.0, 1.6 * (d.m - 1.0));
  const auto ladder = moser_ladder(p0, d.m, 4);
  for (std::size_t k = 1; k < ladder.size(); ++k) {
    cfg.p_list.push_back(ladder[k]);
    cfg.q_list.push_back(2.0);
  }
  const int n = std::max(analysis_n, 2);
  cfg.s_list = {std::min(1.5, 0.5 * (1.0 + admissible_s_limit(n)))};
  cfg.theta = std::max(1.0, 0.5 * d.m) + 0.5;
  return cfg;
}

void validate(const MonitorConfig& c) {
  if (c.p_list.size() != c.q_list.size())
    throw DomainError("monitor: p_list and q_list must have the same length");
  for (double p : c.p_list)
    if (!(p > 1.0)) throw DomainError("monitor: p exponents must exceed 1");
  for (double q : c.q_list)
    if (!(q > 1.0)) throw DomainError("monitor: q exponents must exceed 1");
  for (double s : c.s_list)
    if (!(s >= 1.0)) throw DomainError("monitor: s exponents must be >= 1");
  if (c.theta != 0.0 && !(c.theta > 1.0)) throw DomainError("monitor: theta must exceed 1 (or be 0)");
  if (!(c.tolerance >= 0.0)) throw DomainError("monitor: tolerance must be >= 0");
  if (!(c.window_fraction > 0.0 && c.window_fraction < 1.0))
    throw DomainError("monitor: window_fraction must lie in (0, 1)");
  if (!(c.growth_tolerance >= 0.0)) throw DomainError("monitor: growth_tolerance must be >= 0");
}

double mass_star(const Field& u0, const Grid& g) { return std::max(g.measure(), integrate(u0, g)); }

InvariantEntry check_mass_bound(std::span<const TimeValue> mass, double m_star, double mu, double tol) {
  InvariantEntry e;
  e.tolerance = tol;
  if (mass.empty()) throw ContractViolation("check_mass_bound: empty series");
  e.worst_slack = -std::numeric_limits<double>::infinity();
  if (mu == 0.0) {
    e.check = "mass_conservation";
    e.bound = mass.front().value;
    for (const auto& s : mass) {
      const double slack = std::abs(s.value - e.bound);
      if (slack > e.worst_slack) {
        e.worst_slack = slack;
        e.t_worst = s.t;
      }
    }
    e.details = "mu = 0: |mass(t) - mass(0)| against tol * mass(0)";
  } else {
    e.check = "mass_bound";
    e.bound = m_star;
    for (const auto& s : mass) {
      const double slack = s.value - m_star;
      if (slack > e.worst_slack) {
        e.worst_slack = slack;
        e.t_worst = s.t;
      }
    }
    e.details = "mass(t) <= m* = " + fmt(m_star);
  }
  e.pass = e.worst_slack <= tol * std::abs(e.bound);
  return e;
}

double compute_K(const Field& w0, const Grid& g) {
  require_same_grid(w0, g, "compute_K");
  for (std::size_t k = 0; k < w0.size(); ++k)
    if (!(w0[k] > 0.0)) throw DomainError("compute_K: w0 must be positive, cell " + std::to_string(k));
  Field root(g);
  for (std::size_t k = 0; k < w0.size(); ++k) root[k] = std::sqrt(w0[k]);
  return linf_norm(laplacian(w0, g)) + 4.0 * linf_norm(grad_mag_sq(root, g)) + linf_norm(w0) / std::numbers::e;
}

InvariantEntry check_neg_laplacian_w(const State& state, const Field& w0, double K, double tol, const Grid& g) {
  require_same_grid(state.w, g, "check_neg_laplacian_w");
  const Field lap = laplacian(state.w, g);
  const double w0_max = linf_norm(w0);
  InvariantEntry e;
  e.check = "neg_laplacian_w";
  e.bound = K + 1.0;
  e.tolerance = tol;
  e.t_worst = state.t;
  e.worst_slack = -std::numeric_limits<double>::infinity();
  std::size_t worst_cell = 0;
  for (std::size_t k = 0; k < lap.size(); ++k) {
    const double slack = -lap[k] - w0_max * state.v[k] - K;
    if (slack > e.worst_slack) {
      e.worst_slack = slack;
      worst_cell = k;
    }
  }
  e.pass = e.worst_slack <= tol * e.bound;
  e.details = "-Lap w <= ||w0|| v + K with K = " + fmt(K) + "; worst cell " + std::to_string(worst_cell);
  return e;
}

double functional_y(const Field& u, const Field& v, double p, double q, const Grid& g) {
  require_same_grid(u, g, "functional_y");
  require_same_grid(v, g, "functional_y");
  Field up(g);
  for (std::size_t k = 0; k < u.size(); ++k) up[k] = std::pow(std::abs(u[k]), p);
  Field gradient = grad_mag_sq(v, g);
  for (auto& x : gradient.values()) x = std::pow(x, q);
  return integrate(up, g) + integrate(gradient, g);
}

double grad_lp_norm(const Field& v, double s, const Grid& g) {
  Field magnitude = grad_mag_sq(v, g);
  for (auto& x : magnitude.values()) x = std::sqrt(x);
  return lp_norm(magnitude, s, g);
}

Verdict boundedness_verdict(std::span<const TimeValue> series, double window_fraction, double growth_tol) {
  if (series.size() < 10) return Verdict::Inconclusive;
  const double t0 = series.front().t;
  const double t1 = series.back().t;
  const double split = t1 - window_fraction * (t1 - t0);
  double earlier = -std::numeric_limits<double>::infinity();
  double final_window = -std::numeric_limits<double>::infinity();
  std::size_t earlier_count = 0, final_count = 0;
  for (const auto& s : series) {
    if (s.t < split) {
      earlier = std::max(earlier, s.value);
      ++earlier_count;
    } else {
      final_window = std::max(final_window, s.value);
      ++final_count;
    }
  }
  if (earlier_count == 0 || final_count == 0) return Verdict::Inconclusive;
  if (final_window <= (1.0 + growth_tol) * earlier) return Verdict::Bounded;
  if (final_window > 2.0 * earlier) return Verdict::Growing;
  return Verdict::Inconclusive;
}

NormSeries semigroup_norm_series(const Trajectory& traj, std::span<const double> s_list, int analysis_n,
                                 const Grid& g) {
  NormSeries out;
  const double limit = analysis_n >= 2 ? admissible_s_limit(analysis_n) : std::numeric_limits<double>::infinity();
  for (double s : s_list) {
    if (!(s >= 1.0 && s < limit))
      out.warnings.push_back("s = " + fmt(s) + " lies outside [1, " + fmt(limit) + ") for n = " +
                             std::to_string(analysis_n));
    out.exponents.push_back(s);
    TimeSeries series;
    for (const auto& state : traj.snapshots) series.push_back({state.t, grad_lp_norm(state.v, s, g)});
    out.series.push_back(std::move(series));
  }
  return out;
}

Monitor::Monitor(MonitorConfig config, const InitialData& init, const ModelParams& params,
                 const DiffusionSpec& diffusion, int analysis_n, const Grid& grid)
    : config_(std::move(config)),
      grid_(grid),
      w0_(init.w0),
      w0_max_(linf_norm(init.w0)),
      K_(compute_K(init.w0, grid)),
      m_star_(mass_star(init.u0, grid)),
      mu_(params.mu),
      regime_(validate_regime(diffusion, analysis_n)),
      y_(config_.p_list.size()),
      gradv_(config_.s_list.size()) {
  validate(config_);
  if (!regime_.within_theorem)
    warnings_.push_back("m = " + fmt(diffusion.m) + " is not above the boundedness threshold " +
                        fmt(regime_.threshold) + " for n = " + std::to_string(analysis_n));
  const double limit = admissible_s_limit(std::max(analysis_n, 2));
  for (double s : config_.s_list)
    if (!(s < limit))
      warnings_.push_back("gradient exponent s = " + fmt(s) + " is outside [1, " + fmt(limit) + ")");
  if (config_.theta != 0.0 && !(config_.theta > std::max(1.0, 0.5 * diffusion.m)))
    warnings_.push_back("theta = " + fmt(config_.theta) + " does not exceed max(1, m/2)");
  bound_worst_.check = "neg_laplacian_w";
  bound_worst_.worst_slack = -std::numeric_limits<double>::infinity();
}

SampleHook Monitor::hook() {
  return [this](const State& s, const SampleRecord& r) { observe(s, r); };
}

void Monitor::observe(const State& state, const SampleRecord& record) {
  const double t = record.t;
  mass_.push_back({t, record.mass});
  linf_u_.push_back({t, record.linf_u});
  for (std::size_t k = 0; k < config_.p_list.size(); ++k)
    y_[k].push_back({t, functional_y(state.u, state.v, config_.p_list[k], config_.q_list[k], grid_)});
  for (std::size_t k = 0; k < config_.s_list.size(); ++k)
    gradv_[k].push_back({t, grad_lp_norm(state.v, config_.s_list[k], grid_)});
  if (config_.theta != 0.0) {
    Field powered(grid_);
    for (std::size_t k = 0; k < powered.size(); ++k) powered[k] = std::pow(state.u[k], config_.theta);
    theta_.push_back({t, integrate(powered, grid_)});
  }
  const InvariantEntry entry = check_neg_laplacian_w(state, w0_, K_, config_.tolerance, grid_);
  bound_slack_.push_back({t, entry.worst_slack});
  if (entry.worst_slack > bound_worst_.worst_slack) bound_worst_ = entry;
  const double excess = record.linf_w - w0_max_;
  if (excess > w_sample_excess_) {
    w_sample_excess_ = excess;
    w_sample_excess_t_ = t;
  }
}

InvariantReport Monitor::report(const Trajectory& traj) const {
  InvariantReport rep;
  if (!mass_.empty()) rep.entries.push_back(check_mass_bound(mass_, m_star_, mu_, config_.tolerance));

  const auto& st = traj.stats;
  if (mu_ == 0.0) {
    InvariantEntry e;
    e.check = "mass_conservation_per_step";
    e.bound = 1.0;
    e.tolerance = 1e-12;
    e.worst_slack = st.max_mass_drift;
    e.pass = st.max_mass_drift <= e.tolerance;
    e.details = "largest relative one-step change of the mass over " + std::to_string(st.steps) + " steps";
    rep.entries.push_back(e);
  }

  {
    InvariantEntry e;
    e.check = "positivity";
    e.bound = 0.0;
    const double lowest = std::min(st.min_u, st.min_v);
    e.worst_slack = st.steps ? -lowest : 0.0;
    e.pass = traj.status != RunStatus::PositivityViolation && (st.steps == 0 || lowest >= 0.0);
    e.details = "min u = " + fmt(st.min_u) + ", min v = " + fmt(st.min_v);
    if (traj.status == RunStatus::PositivityViolation) e.details += "; " + traj.message;
    rep.entries.push_back(e);
  }

  {
    InvariantEntry e;
    e.check = "w_bounds";
    e.bound = w0_max_;
    e.worst_slack = w_sample_excess_;
    e.t_worst = w_sample_excess_t_;
    e.pass = st.w_increase_violations == 0 && st.w_bound_violations == 0 && st.w_nonpositive == 0 &&
             w_sample_excess_ <= 0.0;
    e.details = "0 < w <= ||w0|| and w nonincreasing per step: " + std::to_string(st.w_increase_violations) +
                " increases, " + std::to_string(st.w_bound_violations) + " bound excesses, " +
                std::to_string(st.w_nonpositive) + " nonpositive values; min w = " + fmt(st.min_w);
    rep.entries.push_back(e);
  }

  if (!bound_slack_.empty()) {
    InvariantEntry e = bound_worst_;
    e.bound = K_ + 1.0;
    e.tolerance = config_.tolerance;
    e.pass = e.worst_slack <= e.tolerance * e.bound;
    rep.entries.push_back(e);
  }
  return rep;
}

std::string Monitor::y_label(std::size_t k) const {
  return "y_p" + fmt(config_.p_list.at(k)) + "_q" + fmt(config_.q_list.at(k));
}

std::string Monitor::gradv_label(std::size_t k) const { return "gradv_L" + fmt(config_.s_list.at(k)); }

std::string Monitor::theta_label() const { return "u_pow_" + fmt(config_.theta); }

std::vector<Monitor::NamedVerdict> Monitor::verdicts() const {
  const double wf = config_.window_fraction;
  const double gt = config_.growth_tolerance;
  std::vector<NamedVerdict> out;
  out.push_back({"linf_u", boundedness_verdict(linf_u_, wf, gt)});
  for (std::size_t k = 0; k < gradv_.size(); ++k) out.push_back({gradv_label(k), boundedness_verdict(gradv_[k], wf, gt)});
  for (std::size_t k = 0; k < y_.size(); ++k) out.push_back({y_label(k), boundedness_verdict(y_[k], wf, gt)});
  if (!theta_.empty()) out.push_back({theta_label(), boundedness_verdict(theta_, wf, gt)});
  return out;
}

}  // namespace cht
