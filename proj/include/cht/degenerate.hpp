#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cht/grid.hpp"
#include "cht/model.hpp"
#include "cht/monitor.hpp"
#include "cht/stepper.hpp"

namespace cht {

/// coefficient * cos(kx pi x / L1) cos(ky pi y / L2). Cosine modes satisfy the
/// Neumann condition, so no spatial cutoff is needed.
struct CosineMode {
  double coefficient = 1.0;
  int kx = 1;
  int ky = 0;
};

/// Test function  phi(x, t) = eta(t) * sum of cosine modes, with the cubic
/// cutoff eta(t) = (1 - t / T_c)^3 for t < T_c and 0 afterwards.
struct TestFunctionSpec {
  std::vector<CosineMode> modes{CosineMode{}};
  double cutoff_time = 1.0;

  double eta(double t) const;
  double eta_t(double t) const;
  double spatial(double x, double y, const Grid& g) const;
  double spatial_dx(double x, double y, const Grid& g) const;
  double spatial_dy(double x, double y, const Grid& g) const;
};

/// Left side minus right side of the three weak identities (signed, not
/// normalized).
struct WeakResiduals {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
};

/// Assembles the weak identities over the stored snapshots of traj
/// (snapshot 0 must be the initial data at t = 0, and the cutoff time must
/// not exceed the last snapshot time). Space: midpoint rule on cells, face
/// fluxes paired with the analytic face-normal derivative of phi. Time:
/// trapezoidal rule over the snapshot times. Throws ContractViolation when
/// snapshots are missing.
WeakResiduals weak_residual(const Trajectory& traj, const TestFunctionSpec& phi, const ModelParams& p,
                            const DiffusionSpec& d, const Grid& g);

struct ThetaSeries {
  TimeSeries series;
  std::vector<std::string> warnings;
};

/// int u^theta over the stored snapshots. theta <= max(1, m/2) is reported as
/// a warning and still evaluated.
ThetaSeries theta_power_series(const Trajectory& traj, double theta, double m, const Grid& g);

/// sqrt of the trapezoidal time integral of ||u_a(t) - u_b(t)||_{L^2}^2 over
/// the shared snapshot times. Throws ContractViolation if the snapshot times
/// differ.
double space_time_l2_distance(const Trajectory& a, const Trajectory& b, const Grid& g);

struct SweepMember {
  double epsilon = 0.0;
  Trajectory trajectory;
  InvariantReport report;
  std::vector<Monitor::NamedVerdict> verdicts;
  std::optional<Monitor> monitor;
  double max_linf_u = 0.0;
  bool ok() const { return trajectory.status == RunStatus::Completed; }
};

struct SweepReport {
  std::vector<double> epsilons;
  /// distances[k] between members k and k + 1; NaN if either run failed.
  std::vector<double> distances;
  std::vector<SweepMember> members;
  /// Relative slack of the monotonicity test; an empirical calibration.
  double slack = 0.1;
  bool cauchy_pass = false;
};

/// Runs base with D regularized by every eps in eps_list (length >= 3,
/// positive, nonincreasing), snapshots enabled, members in parallel. Each
/// member is monitored with monitor_config, or with the defaults for its
/// diffusion when null. The
/// Cauchy verdict passes iff every run completed and
/// d_{k+1} <= (1 + slack) d_k for all k.
SweepReport epsilon_sweep(const Simulation& base, std::span<const double> eps_list, int analysis_n = 2,
                          unsigned workers = 0, double slack = 0.1,
                          const MonitorConfig* monitor_config = nullptr);

/// The Cauchy verdict on a list of distances.
bool cauchy_verdict(std::span<const double> distances, double slack);

}  // namespace cht
