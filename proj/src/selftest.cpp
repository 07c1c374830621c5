#include "cht/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cht/errors.hpp"
#include "cht/operators.hpp"
#include "cht/presets.hpp"

namespace cht {

namespace {

constexpr double kPi = std::numbers::pi;

Grid unit_grid(int dim, int n) { return dim == 1 ? Grid::line(1.0, n) : Grid::rectangle(1.0, 1.0, n, n); }

// psi = cos(pi x) cos(pi y) on the unit square (cos(pi x) in 1D) and its derivatives.
struct Mode {
  int dim;
  double psi(double x, double y) const { return std::cos(kPi * x) * (dim == 2 ? std::cos(kPi * y) : 1.0); }
  double grad_sq(double x, double y) const {
    const double gx = -kPi * std::sin(kPi * x) * (dim == 2 ? std::cos(kPi * y) : 1.0);
    const double gy = dim == 2 ? -kPi * std::cos(kPi * x) * std::sin(kPi * y) : 0.0;
    return gx * gx + gy * gy;
  }
  double lap(double x, double y) const { return -dim * kPi * kPi * psi(x, y); }
};

double l2_error(const Field& a, const Field& b, const Grid& g) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s * g.cell_volume());
}

template <class Study>
OrderStudy two_level(int n, Study&& error_at) {
  return {error_at(n), error_at(2 * n)};
}

Field random_field(const Grid& g, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> uni(lo, hi);
  Field f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = uni(rng);
  return f;
}

double diffusion_derivative(const DiffusionSpec& d, double s) {
  if (d.m == 1.0) return 0.0;
  return d.delta * (d.m - 1.0) * std::pow(s + d.epsilon, d.m - 2.0);
}

}  // namespace

double observed_order(double coarse_error, double fine_error) { return std::log2(coarse_error / fine_error); }

OrderStudy laplacian_order(int dim, int n) {
  const Mode mode{dim};
  return two_level(n, [&](int cells) {
    const Grid g = unit_grid(dim, cells);
    const Field f = Field::from_function(g, [&](double x, double y) { return mode.psi(x, y); });
    const Field exact = Field::from_function(g, [&](double x, double y) { return mode.lap(x, y); });
    return l2_error(laplacian(f, g), exact, g);
  });
}

OrderStudy diffusion_order(const DiffusionSpec& spec, int dim, int n) {
  const Mode mode{dim};
  return two_level(n, [&](int cells) {
    const Grid g = unit_grid(dim, cells);
    auto u_of = [&](double x, double y) { return 1.0 + 0.5 * mode.psi(x, y); };
    const Field u = Field::from_function(g, u_of);
    const Field exact = Field::from_function(g, [&](double x, double y) {
      const double s = u_of(x, y);
      return diffusion_derivative(spec, s) * 0.25 * mode.grad_sq(x, y) + eval_diffusion(spec, s) * 0.5 * mode.lap(x, y);
    });
    return l2_error(diffusion_divergence(u, spec, g), exact, g);
  });
}

OrderStudy taxis_order(int dim, int n) {
  const Mode mode{dim};
  return two_level(n, [&](int cells) {
    const Grid g = unit_grid(dim, cells);
    auto u_of = [&](double x, double y) { return 1.0 + 0.5 * mode.psi(x, y); };
    const Field u = Field::from_function(g, u_of);
    const Field psi = Field::from_function(g, [&](double x, double y) { return mode.psi(x, y); });
    const Field exact = Field::from_function(g, [&](double x, double y) {
      return 0.5 * mode.grad_sq(x, y) + u_of(x, y) * mode.lap(x, y);
    });
    return l2_error(taxis_divergence(u, psi, g), exact, g);
  });
}

double step_v_eigen_error(int dim, int n, double dt) {
  const Grid g = unit_grid(dim, n);
  const Mode mode{dim};
  State s(g);
  s.v = Field::from_function(g, [&](double x, double y) { return mode.psi(x, y); });
  double lambda = 0.0;
  for (int d = 0; d < dim; ++d) {
    const double h = g.spacing(d);
    const double sn = std::sin(0.5 * kPi * h);
    lambda += 4.0 * sn * sn / (h * h);
  }
  const Field v_new = step_v(s, dt, g);
  double err = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) err = std::max(err, std::abs(v_new[k] - s.v[k] / (1.0 + dt + dt * lambda)));
  return err;
}

double flux_conservation_defect(int dim, const DiffusionSpec& spec, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Grid small = dim == 1 ? Grid::line(1.3, 11) : Grid::rectangle(1.3, 0.7, 7, 5);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const Field u = random_field(small, rng, 0.0, 2.0);
    const Field psi = random_field(small, rng, -1.0, 1.0);
    for (const Field& r : {laplacian(psi, small), diffusion_divergence(u, spec, small), taxis_divergence(u, psi, small)}) {
      double abs_sum = 0.0;
      for (std::size_t k = 0; k < r.size(); ++k) abs_sum += std::abs(r[k]);
      if (abs_sum > 0.0) worst = std::max(worst, std::abs(pairwise_sum(r.values())) / abs_sum);
    }
  }
  return worst;
}

std::size_t random_step_violations(int dim, const ModelParams& params, const DiffusionSpec& spec,
                                   DiffusionScheme scheme, int steps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const Grid small = dim == 1 ? Grid::line(1.0, 16) : Grid::rectangle(1.0, 1.0, 8, 8);
  StepControls c;
  c.scheme = scheme;
  c.dt_max = 0.05;
  std::size_t violations = 0;
  for (int trial = 0; trial < steps; ++trial) {
    State s(0.0, random_field(small, rng, 0.0, 3.0), random_field(small, rng, 0.0, 3.0),
            random_field(small, rng, 0.05, 2.0));
    for (std::size_t k = 0; k < s.u.size(); ++k)
      if (uni(rng) < 0.2) s.u[k] = 0.0;
    const double dt = stable_dt(s, params, spec, c, small);
    const Field v_new = step_v(s, dt, small);
    Field v_mid(small);
    for (std::size_t k = 0; k < v_mid.size(); ++k) v_mid[k] = 0.5 * (s.v[k] + v_new[k]);
    const Field w_new = step_w(s, v_mid, dt);
    const State mid(s.t, s.u, v_new, w_new);
    try {
      const Field u_new = step_u(mid, dt, params, spec, small, scheme);
      for (std::size_t k = 0; k < u_new.size(); ++k)
        if (u_new[k] < 0.0 || v_new[k] < 0.0 || !(w_new[k] > 0.0) || w_new[k] > s.w[k]) ++violations;
    } catch (const PositivityViolation&) {
      ++violations;
    }
  }
  return violations;
}

std::vector<SelfTestResult> run_self_tests(const RunConfig& config) {
  std::vector<SelfTestResult> out;
  const Grid g = make_grid(config);
  const int dim = config.dim;

  {
    RunConfig steady = config;
    steady.initial = PresetSpec{};
    steady.initial.kind = PresetKind::ConstantSteady;
    if (config.initial.kind == PresetKind::ConstantSteady) steady.initial.w0 = config.initial.w0;
    steady.controls.t_end = std::min(config.controls.t_end, 1.0);
    steady.controls.sample_every = std::min(config.controls.sample_every, steady.controls.t_end);
    const Simulation sim = make_simulation(steady);
    const Trajectory traj = cht::advance(sim);
    double dev = std::numeric_limits<double>::infinity();
    if (traj.status == RunStatus::Completed && traj.final_state) {
      const State& s = *traj.final_state;
      dev = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k)
        dev = std::max({dev, std::abs(s.u[k] - 1.0), std::abs(s.v[k] - 1.0), std::abs(s.w[k])});
    }
    const double tol = 1e-10 + steady.initial.w0;
    out.push_back({"steady_state", dev <= tol, dev, tol, "max |(u, v, w) - (1, 1, 0)| at t_end"});
  }

  auto order_check = [&](const char* name, OrderStudy st, double need) {
    out.push_back({name, st.order() >= need, st.order(), need, ""});
  };
  order_check("laplacian_order", laplacian_order(dim, 16), 1.9);
  order_check("diffusion_order", diffusion_order(config.diffusion, dim, 16), 1.9);
  order_check("taxis_order", taxis_order(dim, 16), 0.9);

  {
    const double err = step_v_eigen_error(dim, std::min(config.cells[0], 64), 0.05);
    out.push_back({"step_v_eigen", err <= 1e-10, err, 1e-10, ""});
  }

  {
    const double worst = flux_conservation_defect(dim, config.diffusion, 20, 20240611);
    out.push_back({"flux_conservation", worst <= 1e-12, worst, 1e-12, "relative integral of divergence outputs"});
  }
  {
    const int steps = 100;
    const std::size_t violations =
        random_step_violations(dim, config.params, config.diffusion, config.controls.scheme, steps, 20240612);
    out.push_back({"random_step_positivity", violations == 0, static_cast<double>(violations), 0.0,
                   std::to_string(steps) + " randomized steps"});
  }
  return out;
}

}  // namespace cht
