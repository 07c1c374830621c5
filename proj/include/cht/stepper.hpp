#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cht/grid.hpp"
#include "cht/model.hpp"
#include "cht/operators.hpp"

namespace cht {

/// How the nonlinear diffusion of u is advanced.
enum class DiffusionScheme {
  /// Forward Euler flux update; dt is limited by h^2 / D_max.
  Explicit,
  /// Backward Euler with the face diffusivities frozen at the old u. The
  /// system is an M-matrix, so positivity only needs the transport limit.
  Implicit,
};

const char* to_string(DiffusionScheme scheme);
std::optional<DiffusionScheme> parse_diffusion_scheme(std::string_view text);

/// Densities (u, v, w) at time t.
struct State {
  explicit State(const Grid& g) : u(g), v(g), w(g) {}
  State(double time, Field cells, Field enzyme, Field matrix)
      : t(time), u(std::move(cells)), v(std::move(enzyme)), w(std::move(matrix)) {}

  double t = 0.0;
  Field u;  // cancer cell density
  Field v;  // matrix-degrading enzyme concentration
  Field w;  // extracellular matrix density
};

struct StepControls {
  double cfl_diff = 0.5;
  double cfl_adv = 0.1;
  double dt_max = std::numeric_limits<double>::infinity();
  double t_end = 1.0;
  double sample_every = 0.1;
  /// Sup-norm of u above which the run stops as a suspected blow-up.
  /// Zero selects 1e6 * max(1, ||u0||_inf).
  double blowup_threshold = 0.0;
  DiffusionScheme scheme = DiffusionScheme::Explicit;
  /// Keep full (u, v, w) copies at every sample time.
  bool store_snapshots = false;

  bool operator==(const StepControls&) const = default;
};

void validate(const StepControls& controls);

struct InitialData {
  Field u0;
  Field v0;
  Field w0;
};

/// u0 >= 0 with positive integral, v0 >= 0, w0 > 0, all finite and on g.
/// Throws DomainError or ContractViolation.
void validate(const InitialData& init, const Grid& g);

/// min(dt_max, cfl_diff h^2 / (2 dim D_max), cfl_adv h / V_max), where V_max
/// is the largest face speed |grad(chi v + xi w)|. The diffusion limit is
/// dropped for the implicit scheme or when D_max = 0. May return +inf when
/// nothing constrains the step. Throws NumericalFailure on non-finite fields.
double stable_dt(const State& s, const ModelParams& p, const DiffusionSpec& d, const StepControls& c,
                 const Grid& g);

/// Solves beta x - alpha Lap x = rhs (Neumann) by preconditioned CG to
/// relative residual rel_tol. The initial guess defaults to zero.
Field solve_helmholtz(const Field& rhs, double alpha, double beta, const Grid& g,
                      const Field* initial_guess = nullptr, double rel_tol = 1e-10);

/// v_new from (1 + dt) v_new - dt Lap v_new = v + dt u.
Field step_v(const State& s, double dt, const Grid& g);

/// w_new = w exp(-v_mid dt), cellwise.
Field step_w(const State& s, const Field& v_mid, double dt);

/// u_new from the density equation. s.v and s.w are the already-updated
/// chemical fields that drive the transport. Taxis is upwinded against the
/// combined potential chi v + xi w; the logistic term is split as
/// +mu u explicit and -mu u (u + w) implicit (Patankar), so
///
///     u_new = (u + dt [div(D grad u) - div(u grad psi) + mu u]) / (1 + mu dt (u + w))
///
/// for the explicit scheme. Throws PositivityViolation if any cell goes
/// negative, NumericalFailure on non-finite output.
Field step_u(const State& s, double dt, const ModelParams& p, const DiffusionSpec& d, const Grid& g,
             DiffusionScheme scheme = DiffusionScheme::Explicit);

enum class RunStatus { Completed, BlowUpSuspected, SolverFailure, PositivityViolation };
const char* to_string(RunStatus status);

struct SampleRecord {
  double t = 0.0;
  double dt = 0.0;  // last step taken before the sample, 0 at t = 0
  std::size_t step = 0;
  double mass = 0.0;
  double linf_u = 0.0;
  double linf_v = 0.0;
  double linf_w = 0.0;
  double l2_gradv = 0.0;
};

/// Per-step structural bookkeeping, accumulated over the whole run.
struct StepStatistics {
  std::size_t steps = 0;
  double min_dt = std::numeric_limits<double>::infinity();
  double max_dt = 0.0;
  /// Largest relative one-step change of the integral of u; tracked only for mu = 0.
  double max_mass_drift = 0.0;
  std::size_t w_increase_violations = 0;  // cell-steps with w_new > w_old
  std::size_t w_bound_violations = 0;     // cell-steps with w > ||w0||_inf
  std::size_t w_nonpositive = 0;          // cell-steps with w <= 0
  double min_u = std::numeric_limits<double>::infinity();
  double min_v = std::numeric_limits<double>::infinity();
  double min_w = std::numeric_limits<double>::infinity();
};

struct Trajectory {
  RunStatus status = RunStatus::Completed;
  std::string message;
  double blowup_threshold = 0.0;
  std::vector<SampleRecord> samples;
  std::vector<State> snapshots;
  std::optional<State> final_state;
  StepStatistics stats;
};

using SampleHook = std::function<void(const State&, const SampleRecord&)>;

/// Runs the splitting v -> w -> u from t = 0 to t_end. Steps are clipped so
/// that every multiple of sample_every (and t_end) is hit exactly; hooks run
/// at t = 0 and at each of those times. Stops early with BlowUpSuspected,
/// SolverFailure or PositivityViolation. Invalid inputs throw.
Trajectory advance(const InitialData& init, const ModelParams& p, const DiffusionSpec& d,
                   const StepControls& c, const Grid& g, std::span<const SampleHook> hooks = {});

/// Everything needed to launch one simulation.
struct Simulation {
  Grid grid;
  InitialData init;
  ModelParams params;
  DiffusionSpec diffusion;
  StepControls controls;
};

Trajectory advance(const Simulation& sim, std::span<const SampleHook> hooks = {});

}  // namespace cht
