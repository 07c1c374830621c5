#include "cht/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cht/errors.hpp"
#include "cht/linear_solver.hpp"

namespace cht {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Tighter than the generic Helmholtz default: v feeds the positivity checks
// and the eigenpair oracle is asserted to 1e-10 in the solution itself.
constexpr double kStepVTolerance = 1e-13;
constexpr double kImplicitUTolerance = 1e-12;
constexpr double kImplicitUSumTolerance = 1e-14;

void require_finite(const Field& f, const char* what) {
  if (!f.all_finite()) throw NumericalFailure(std::string(what) + " contains non-finite values");
}

void require_positive_dt(double dt, const char* where) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw DomainError(std::string(where) + ": dt must be positive and finite");
}

// Reusable buffers for the per-step kernels.
class StepKernel {
 public:
  explicit StepKernel(const Grid& g)
      : grid_(g), flux_(g), coeff_(g), work_(g), psi_(g), diffusion_(g), diag_(g.size()) {}

  void step_v(const State& s, double dt, Field& v_new) {
    require_positive_dt(dt, "step_v");
    Field& rhs = work_;
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = s.v[k] + dt * s.u[k];
    std::fill(diag_.begin(), diag_.end(), 1.0 + dt);
    v_new = s.v;
    solve_face_system(diag_, nullptr, dt, rhs, v_new, {.rel_tol = kStepVTolerance});
  }

  void step_u(const State& s, double dt, const ModelParams& p, const DiffusionSpec& d,
              DiffusionScheme scheme, Field& u_new) {
    require_positive_dt(dt, "step_u");
    const std::size_t n = grid_.size();
    for (std::size_t k = 0; k < n; ++k) psi_[k] = p.chi * s.v[k] + p.xi * s.w[k];

    Field& transport = work_;
    taxis_fluxes(s.u, psi_, flux_);
    divergence(flux_, transport);

    if (scheme == DiffusionScheme::Explicit) {
      Field& diffusion = diffusion_;
      diffusion_fluxes(s.u, d, flux_);
      divergence(flux_, diffusion);
      for (std::size_t k = 0; k < n; ++k) {
        const double u = s.u[k];
        const double numerator = u + dt * (diffusion[k] - transport[k]) + dt * p.mu * u;
        u_new[k] = numerator / (1.0 + dt * p.mu * (u + s.w[k]));
      }
    } else {
      Field& rhs = psi_;
      for (std::size_t k = 0; k < n; ++k) {
        const double u = s.u[k];
        rhs[k] = u - dt * transport[k] + dt * p.mu * u;
        diag_[k] = 1.0 + dt * p.mu * (u + s.w[k]);
      }
      face_diffusivity(s.u, d, coeff_);
      u_new = s.u;
      solve_face_system(diag_, &coeff_, dt, rhs, u_new,
                        {.rel_tol = kImplicitUTolerance, .sum_tol = kImplicitUSumTolerance});
    }

    require_finite(u_new, "step_u result");
    for (std::size_t k = 0; k < n; ++k)
      if (u_new[k] < 0.0)
        throw PositivityViolation("step_u: density became negative (" + std::to_string(u_new[k]) +
                                      ") at cell " + std::to_string(k) +
                                      "; the step exceeded the positivity limit",
                                  k, u_new[k]);
  }

 private:
  Grid grid_;
  FaceFluxSet flux_;
  FaceFluxSet coeff_;
  Field work_;
  Field psi_;
  Field diffusion_;
  std::vector<double> diag_;
};

void exponential_decay(const Field& w, const Field& v_mid, double dt, Field& out) {
  for (std::size_t k = 0; k < w.size(); ++k) out[k] = w[k] * std::exp(-v_mid[k] * dt);
}

// Per-thread potential buffer for stable_dt, reallocated only on grid change.
Field& scratch_psi(const Grid& g) {
  thread_local std::optional<Field> psi;
  if (!psi || !(psi->grid() == g)) psi.emplace(g);
  return *psi;
}

SampleRecord make_sample(const State& s, double dt, std::size_t step, const Grid& g) {
  SampleRecord r;
  r.t = s.t;
  r.dt = dt;
  r.step = step;
  r.mass = integrate(s.u, g);
  r.linf_u = linf_norm(s.u);
  r.linf_v = linf_norm(s.v);
  r.linf_w = linf_norm(s.w);
  r.l2_gradv = std::sqrt(integrate(grad_mag_sq(s.v, g), g));
  return r;
}

}  // namespace

const char* to_string(DiffusionScheme scheme) {
  return scheme == DiffusionScheme::Explicit ? "explicit" : "implicit";
}

std::optional<DiffusionScheme> parse_diffusion_scheme(std::string_view text) {
  if (text == "explicit") return DiffusionScheme::Explicit;
  if (text == "implicit") return DiffusionScheme::Implicit;
  return std::nullopt;
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Completed: return "Completed";
    case RunStatus::BlowUpSuspected: return "BlowUpSuspected";
    case RunStatus::SolverFailure: return "SolverFailure";
    case RunStatus::PositivityViolation: return "PositivityViolation";
  }
  return "?";
}

void validate(const StepControls& c) {
  auto in_unit = [](double x) { return x > 0.0 && x <= 1.0; };
  if (!in_unit(c.cfl_diff)) throw DomainError("controls: cfl_diff must lie in (0, 1]");
  if (!in_unit(c.cfl_adv)) throw DomainError("controls: cfl_adv must lie in (0, 1]");
  if (!(c.dt_max > 0.0)) throw DomainError("controls: dt_max must be positive");
  if (!(c.t_end > 0.0) || !std::isfinite(c.t_end)) throw DomainError("controls: t_end must be positive");
  if (!(c.sample_every > 0.0) || !std::isfinite(c.sample_every))
    throw DomainError("controls: sample_every must be positive");
  if (!(c.blowup_threshold >= 0.0)) throw DomainError("controls: blowup_threshold must be >= 0");
}

void validate(const InitialData& init, const Grid& g) {
  require_same_grid(init.u0, g, "initial u0");
  require_same_grid(init.v0, g, "initial v0");
  require_same_grid(init.w0, g, "initial w0");
  if (!init.u0.all_finite() || !init.v0.all_finite() || !init.w0.all_finite())
    throw DomainError("initial data must be finite");
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (init.u0[k] < 0.0) throw DomainError("initial u0 is negative at cell " + std::to_string(k));
    if (init.v0[k] < 0.0) throw DomainError("initial v0 is negative at cell " + std::to_string(k));
    if (!(init.w0[k] > 0.0)) throw DomainError("initial w0 is not positive at cell " + std::to_string(k));
  }
  if (!(integrate(init.u0, g) > 0.0)) throw DomainError("initial u0 vanishes identically");
}

double stable_dt(const State& s, const ModelParams& p, const DiffusionSpec& d, const StepControls& c,
                 const Grid& g) {
  require_same_grid(s.u, g, "stable_dt");
  require_finite(s.u, "u");
  require_finite(s.v, "v");
  require_finite(s.w, "w");

  double dt = c.dt_max;
  const double h_min = g.h_min();
  if (c.scheme == DiffusionScheme::Explicit) {
    // D is nondecreasing, so its maximum sits at the largest density.
    double u_max = 0.0;
    for (double u : s.u.values()) u_max = std::max(u_max, u);
    const double d_max = eval_diffusion(d, u_max);
    if (d_max > 0.0) dt = std::min(dt, c.cfl_diff * h_min * h_min / (2.0 * g.dim() * d_max));
  }

  double v_max = 0.0;
  const int nx = g.cells(0);
  const int ny = g.cells(1);
  Field& psi = scratch_psi(g);
  for (std::size_t k = 0; k < psi.size(); ++k) psi[k] = p.chi * s.v[k] + p.xi * s.w[k];
  double jump = 0.0;
  for (int j = 0; j < ny; ++j) {
    const double* row = psi.data() + g.index(0, j);
    for (int i = 1; i < nx; ++i) jump = std::max(jump, std::abs(row[i] - row[i - 1]));
  }
  v_max = jump / g.spacing(0);
  if (g.dim() == 2) {
    jump = 0.0;
    for (int j = 1; j < ny; ++j) {
      const double* below = psi.data() + g.index(0, j - 1);
      const double* above = psi.data() + g.index(0, j);
      for (int i = 0; i < nx; ++i) jump = std::max(jump, std::abs(above[i] - below[i]));
    }
    v_max = std::max(v_max, jump / g.spacing(1));
  }
  if (v_max > 0.0) dt = std::min(dt, c.cfl_adv * h_min / v_max);
  return dt;
}

Field solve_helmholtz(const Field& rhs, double alpha, double beta, const Grid& g, const Field* initial_guess,
                      double rel_tol) {
  require_same_grid(rhs, g, "solve_helmholtz");
  if (!(alpha > 0.0)) throw DomainError("solve_helmholtz: alpha must be positive");
  if (!(beta >= 1.0)) throw DomainError("solve_helmholtz: beta must be >= 1");
  Field x = initial_guess ? *initial_guess : Field(g);
  require_same_grid(x, g, "solve_helmholtz initial guess");
  const std::vector<double> diag(g.size(), beta);
  solve_face_system(diag, nullptr, alpha, rhs, x, {.rel_tol = rel_tol});
  return x;
}

Field step_v(const State& s, double dt, const Grid& g) {
  require_same_grid(s.v, g, "step_v");
  StepKernel kernel(g);
  Field out(g);
  kernel.step_v(s, dt, out);
  return out;
}

Field step_w(const State& s, const Field& v_mid, double dt) {
  require_same_grid(v_mid, s.w.grid(), "step_w");
  require_positive_dt(dt, "step_w");
  Field out(s.w.grid());
  exponential_decay(s.w, v_mid, dt, out);
  return out;
}

Field step_u(const State& s, double dt, const ModelParams& p, const DiffusionSpec& d, const Grid& g,
             DiffusionScheme scheme) {
  require_same_grid(s.u, g, "step_u");
  StepKernel kernel(g);
  Field out(g);
  kernel.step_u(s, dt, p, d, scheme, out);
  return out;
}

Trajectory advance(const InitialData& init, const ModelParams& p, const DiffusionSpec& d,
                   const StepControls& c, const Grid& g, std::span<const SampleHook> hooks) {
  validate(init, g);
  validate(p);
  validate(d);
  validate(c);

  Trajectory traj;
  traj.blowup_threshold =
      c.blowup_threshold > 0.0 ? c.blowup_threshold : 1e6 * std::max(1.0, linf_norm(init.u0));
  const double w_cap = linf_norm(init.w0);

  State state(0.0, init.u0, init.v0, init.w0);
  StepKernel kernel(g);
  Field v_new(g), v_mid(g), w_new(g), u_new(g);
  double last_dt = 0.0;

  auto record = [&] {
    const SampleRecord rec = make_sample(state, last_dt, traj.stats.steps, g);
    traj.samples.push_back(rec);
    if (c.store_snapshots) traj.snapshots.push_back(state);
    for (const auto& hook : hooks) hook(state, rec);
    return rec;
  };

  auto blown_up = [&](const SampleRecord& rec) {
    if (rec.linf_u > traj.blowup_threshold) {
      traj.status = RunStatus::BlowUpSuspected;
      traj.message = "sup-norm of u " + std::to_string(rec.linf_u) + " exceeds blow-up threshold " +
                     std::to_string(traj.blowup_threshold) + " at t = " + std::to_string(rec.t);
      return true;
    }
    return false;
  };

  if (blown_up(record())) {
    traj.final_state = std::move(state);
    return traj;
  }

  std::size_t next_sample_index = 1;
  auto sample_time = [&](std::size_t k) { return std::min(c.t_end, static_cast<double>(k) * c.sample_every); };
  const bool track_mass = p.mu == 0.0;

  try {
    while (state.t < c.t_end) {
      const double target = sample_time(next_sample_index);
      double dt = stable_dt(state, p, d, c, g);
      bool lands = false;
      if (!(dt < target - state.t) || state.t + dt >= target - 1e-12 * std::max(1.0, target)) {
        dt = target - state.t;
        lands = true;
      }
      if (!(dt > 0.0)) throw NumericalFailure("time step collapsed to zero at t = " + std::to_string(state.t));

      kernel.step_v(state, dt, v_new);
      for (std::size_t k = 0; k < g.size(); ++k) v_mid[k] = 0.5 * (state.v[k] + v_new[k]);
      exponential_decay(state.w, v_mid, dt, w_new);

      std::swap(state.v, v_new);
      std::swap(state.w, w_new);
      // state.{v,w} now hold the new fields; v_new / w_new hold the old ones.
      kernel.step_u(state, dt, p, d, c.scheme, u_new);

      auto& st = traj.stats;
      if (track_mass) {
        const double before = pairwise_sum(state.u.values());
        const double after = pairwise_sum(u_new.values());
        if (before != 0.0) st.max_mass_drift = std::max(st.max_mass_drift, std::abs(after - before) / std::abs(before));
      }
      std::swap(state.u, u_new);

      for (std::size_t k = 0; k < g.size(); ++k) {
        const double w = state.w[k];
        if (w > w_new[k]) ++st.w_increase_violations;
        if (w > w_cap) ++st.w_bound_violations;
        if (!(w > 0.0)) ++st.w_nonpositive;
        st.min_u = std::min(st.min_u, state.u[k]);
        st.min_v = std::min(st.min_v, state.v[k]);
        st.min_w = std::min(st.min_w, w);
      }
      ++st.steps;
      st.min_dt = std::min(st.min_dt, dt);
      st.max_dt = std::max(st.max_dt, dt);
      last_dt = dt;

      if (st.min_v < 0.0) {
        traj.status = RunStatus::PositivityViolation;
        traj.message = "v became negative (" + std::to_string(st.min_v) + ") at t = " + std::to_string(state.t + dt);
        state.t += dt;
        record();
        break;
      }
      if (lands) {
        state.t = target;
        ++next_sample_index;
        if (blown_up(record())) break;
      } else {
        state.t += dt;
        if (linf_norm(state.u) > traj.blowup_threshold) {
          blown_up(record());
          break;
        }
      }
    }
  } catch (const PositivityViolation& e) {
    traj.status = RunStatus::PositivityViolation;
    traj.message = std::string(e.what()) + " at t = " + std::to_string(state.t);
  } catch (const SolverFailure& e) {
    traj.status = RunStatus::SolverFailure;
    traj.message = std::string(e.what()) + " at t = " + std::to_string(state.t);
  } catch (const NumericalFailure& e) {
    traj.status = RunStatus::SolverFailure;
    traj.message = std::string(e.what()) + " at t = " + std::to_string(state.t);
  }
  traj.final_state = std::move(state);
  return traj;
}

Trajectory advance(const Simulation& sim, std::span<const SampleHook> hooks) {
  return advance(sim.init, sim.params, sim.diffusion, sim.controls, sim.grid, hooks);
}

}  // namespace cht
