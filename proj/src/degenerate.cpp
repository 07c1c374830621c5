#include "cht/degenerate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cht/errors.hpp"
#include "cht/operators.hpp"
#include "cht/parallel.hpp"

namespace cht {

double TestFunctionSpec::eta(double t) const {
  if (t >= cutoff_time) return 0.0;
  const double r = 1.0 - t / cutoff_time;
  return r * r * r;
}

double TestFunctionSpec::eta_t(double t) const {
  if (t >= cutoff_time) return 0.0;
  const double r = 1.0 - t / cutoff_time;
  return -3.0 * r * r / cutoff_time;
}

namespace {

constexpr double kPi = std::numbers::pi;

double wave(int k, double x, double length) { return std::cos(k * kPi * x / length); }
double wave_dx(int k, double x, double length) {
  return -(k * kPi / length) * std::sin(k * kPi * x / length);
}

}  // namespace

double TestFunctionSpec::spatial(double x, double y, const Grid& g) const {
  double s = 0.0;
  for (const auto& m : modes)
    s += m.coefficient * wave(m.kx, x, g.extent(0)) * (g.dim() == 2 ? wave(m.ky, y, g.extent(1)) : 1.0);
  return s;
}

double TestFunctionSpec::spatial_dx(double x, double y, const Grid& g) const {
  double s = 0.0;
  for (const auto& m : modes)
    s += m.coefficient * wave_dx(m.kx, x, g.extent(0)) * (g.dim() == 2 ? wave(m.ky, y, g.extent(1)) : 1.0);
  return s;
}

double TestFunctionSpec::spatial_dy(double x, double y, const Grid& g) const {
  if (g.dim() == 1) return 0.0;
  double s = 0.0;
  for (const auto& m : modes) s += m.coefficient * wave(m.kx, x, g.extent(0)) * wave_dx(m.ky, y, g.extent(1));
  return s;
}

namespace {

// phi's spatial factor at cells and its normal derivative at interior faces,
// laid out like FaceFluxSet and pre-multiplied by the dual-cell volume.
struct SpatialTables {
  explicit SpatialTables(const TestFunctionSpec& phi, const Grid& g) : cell(g), face(g) {
    cell = Field::from_function(g, [&](double x, double y) { return phi.spatial(x, y, g); });
    const double vol = g.cell_volume();
    for (int j = 0; j < g.cells(1); ++j) {
      const double y = g.dim() == 2 ? g.center(1, j) : 0.0;
      for (int i = 1; i < g.cells(0); ++i) face.x_face(i, j) = vol * phi.spatial_dx(i * g.spacing(0), y, g);
    }
    if (g.dim() == 2)
      for (int j = 1; j < g.cells(1); ++j)
        for (int i = 0; i < g.cells(0); ++i)
          face.y_face(i, j) = vol * phi.spatial_dy(g.center(0, i), j * g.spacing(1), g);
  }
  Field cell;
  FaceFluxSet face;
};

double pair_faces(const FaceFluxSet& flux, const FaceFluxSet& weights) {
  double s = 0.0;
  for (std::size_t k = 0; k < flux.x.size(); ++k) s += flux.x[k] * weights.x[k];
  for (std::size_t k = 0; k < flux.y.size(); ++k) s += flux.y[k] * weights.y[k];
  return s;
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) s += 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
  return s;
}

}  // namespace

WeakResiduals weak_residual(const Trajectory& traj, const TestFunctionSpec& phi, const ModelParams& p,
                            const DiffusionSpec& d, const Grid& g) {
  const auto& snaps = traj.snapshots;
  if (snaps.size() < 2) throw ContractViolation("weak_residual: trajectory has no stored snapshots");
  if (snaps.front().t != 0.0) throw ContractViolation("weak_residual: first snapshot is not the initial data");
  if (!(phi.cutoff_time > 0.0) || phi.cutoff_time > snaps.back().t)
    throw ContractViolation("weak_residual: cutoff time must lie in (0, last snapshot time]");
  require_same_grid(snaps.front().u, g, "weak_residual");

  const SpatialTables table(phi, g);
  const double vol = g.cell_volume();
  const std::size_t n = g.size();
  FaceFluxSet flux(g);
  Field psi(g);

  std::vector<double> times, lhs_u, rhs_u, lhs_v, rhs_v, lhs_w, rhs_w;
  double initial_u = 0.0, initial_v = 0.0, initial_w = 0.0;
  for (std::size_t s = 0; s < snaps.size(); ++s) {
    const State& st = snaps[s];
    double au = 0.0, av = 0.0, aw = 0.0, logistic = 0.0, v_source = 0.0, w_source = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double c = table.cell[k];
      const double u = st.u[k], v = st.v[k], w = st.w[k];
      au += u * c;
      av += v * c;
      aw += w * c;
      logistic += u * (1.0 - u - w) * c;
      v_source += (u - v) * c;
      w_source -= v * w * c;
    }
    au *= vol;
    av *= vol;
    aw *= vol;
    logistic *= p.mu * vol;
    v_source *= vol;
    w_source *= vol;

    diffusion_fluxes(st.u, d, flux);
    const double diffusion = pair_faces(flux, table.face);
    for (std::size_t k = 0; k < n; ++k) psi[k] = p.chi * st.v[k] + p.xi * st.w[k];
    taxis_fluxes(st.u, psi, flux);
    const double taxis = pair_faces(flux, table.face);
    gradient_fluxes(st.v, flux);
    const double v_diffusion = pair_faces(flux, table.face);

    const double eta = phi.eta(st.t);
    const double eta_t = phi.eta_t(st.t);
    if (s == 0) {
      initial_u = au * eta;
      initial_v = av * eta;
      initial_w = aw * eta;
    }
    times.push_back(st.t);
    lhs_u.push_back(-au * eta_t);
    rhs_u.push_back(eta * (-diffusion + taxis + logistic));
    lhs_v.push_back(-av * eta_t);
    rhs_v.push_back(eta * (-v_diffusion + v_source));
    lhs_w.push_back(-aw * eta_t);
    rhs_w.push_back(eta * w_source);
  }
  WeakResiduals r;
  r.u = trapezoid(times, lhs_u) - initial_u - trapezoid(times, rhs_u);
  r.v = trapezoid(times, lhs_v) - initial_v - trapezoid(times, rhs_v);
  r.w = trapezoid(times, lhs_w) - initial_w - trapezoid(times, rhs_w);
  return r;
}

ThetaSeries theta_power_series(const Trajectory& traj, double theta, double m, const Grid& g) {
  ThetaSeries out;
  if (!(theta > std::max(1.0, 0.5 * m)))
    out.warnings.push_back("theta = " + std::to_string(theta) + " does not exceed max(1, m/2)");
  Field powered(g);
  for (const auto& st : traj.snapshots) {
    for (std::size_t k = 0; k < powered.size(); ++k) powered[k] = std::pow(st.u[k], theta);
    out.series.push_back({st.t, integrate(powered, g)});
  }
  return out;
}

double space_time_l2_distance(const Trajectory& a, const Trajectory& b, const Grid& g) {
  if (a.snapshots.size() != b.snapshots.size() || a.snapshots.empty())
    throw ContractViolation("space_time_l2_distance: snapshot counts differ or are empty");
  std::vector<double> times, sq;
  Field diff(g);
  for (std::size_t s = 0; s < a.snapshots.size(); ++s) {
    const State& sa = a.snapshots[s];
    const State& sb = b.snapshots[s];
    if (sa.t != sb.t) throw ContractViolation("space_time_l2_distance: snapshot times differ");
    for (std::size_t k = 0; k < diff.size(); ++k) {
      const double e = sa.u[k] - sb.u[k];
      diff[k] = e * e;
    }
    times.push_back(sa.t);
    sq.push_back(integrate(diff, g));
  }
  return std::sqrt(trapezoid(times, sq));
}

bool cauchy_verdict(std::span<const double> distances, double slack) {
  for (double dist : distances)
    if (std::isnan(dist)) return false;
  for (std::size_t k = 1; k < distances.size(); ++k)
    if (distances[k] > (1.0 + slack) * distances[k - 1]) return false;
  return true;
}

SweepReport epsilon_sweep(const Simulation& base, std::span<const double> eps_list, int analysis_n,
                          unsigned workers, double slack, const MonitorConfig* monitor_config) {
  if (eps_list.size() < 3) throw DomainError("epsilon_sweep: need at least three epsilons");
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] > 0.0)) throw DomainError("epsilon_sweep: epsilons must be positive");
    if (k && eps_list[k] > eps_list[k - 1]) throw DomainError("epsilon_sweep: epsilons must not increase");
  }

  SweepReport report;
  report.slack = slack;
  report.epsilons.assign(eps_list.begin(), eps_list.end());
  report.members.resize(eps_list.size());

  parallel_for(eps_list.size(), workers, [&](std::size_t k) {
    Simulation sim = base;
    sim.diffusion = regularize(base.diffusion, eps_list[k]);
    sim.controls.store_snapshots = true;
    SweepMember& member = report.members[k];
    member.epsilon = eps_list[k];
    Monitor& monitor = member.monitor.emplace(monitor_config ? *monitor_config
                                                             : default_monitor_config(sim.diffusion, analysis_n),
                                              sim.init, sim.params, sim.diffusion, analysis_n, sim.grid);
    const SampleHook hooks[] = {monitor.hook()};
    member.trajectory = cht::advance(sim, hooks);
    member.report = monitor.report(member.trajectory);
    member.verdicts = monitor.verdicts();
    for (const auto& s : member.trajectory.samples) member.max_linf_u = std::max(member.max_linf_u, s.linf_u);
  });

  for (std::size_t k = 0; k + 1 < report.members.size(); ++k) {
    const auto& a = report.members[k];
    const auto& b = report.members[k + 1];
    report.distances.push_back(a.ok() && b.ok() ? space_time_l2_distance(a.trajectory, b.trajectory, base.grid)
                                                : std::numeric_limits<double>::quiet_NaN());
  }
  report.cauchy_pass = cauchy_verdict(report.distances, slack);
  return report;
}

}  // namespace cht
