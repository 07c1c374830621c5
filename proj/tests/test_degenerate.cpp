#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "cht/degenerate.hpp"
#include "cht/errors.hpp"
#include "cht/presets.hpp"

using namespace cht;

namespace {

Trajectory constant_trajectory(const Grid& g, double u, int count, double dt) {
  Trajectory t;
  for (int k = 0; k < count; ++k) t.snapshots.emplace_back(k * dt, Field(g, u), Field(g, 1.0), Field(g, 1.0));
  return t;
}

Simulation steady_simulation(const Grid& g) {
  Simulation sim{g, {Field(g, 1.0), Field(g, 1.0), Field(g, 1e-300)}, ModelParams{5, 1, 1},
                 DiffusionSpec{1, 2, 0, 0}, StepControls{}};
  sim.controls.t_end = 1.0;
  sim.controls.sample_every = 0.05;
  sim.controls.store_snapshots = true;
  return sim;
}

Simulation porous_bump(int n, double t_end) {
  const Grid g = Grid::rectangle(1, 1, n, n);
  PresetSpec p;
  p.mass = 1.0;
  p.width = 0.15;
  Simulation sim{g, make_initial_data(p, g), ModelParams{1, 1, 1}, DiffusionSpec{1, 2, 0, 0.1}, StepControls{}};
  sim.controls.t_end = t_end;
  sim.controls.sample_every = 0.05;
  sim.controls.dt_max = 0.005;
  sim.controls.scheme = DiffusionScheme::Implicit;
  sim.controls.store_snapshots = true;
  return sim;
}

}  // namespace

TEST(TestFunction, CutoffAndModes) {
  const Grid g = Grid::rectangle(2.0, 1.0, 4, 4);
  TestFunctionSpec phi{{{2.0, 1, 1}}, 0.5};
  EXPECT_DOUBLE_EQ(phi.eta(0.0), 1.0);
  EXPECT_DOUBLE_EQ(phi.eta(0.25), 0.125);
  EXPECT_DOUBLE_EQ(phi.eta(0.5), 0.0);
  EXPECT_DOUBLE_EQ(phi.eta(0.7), 0.0);
  EXPECT_DOUBLE_EQ(phi.eta_t(0.0), -6.0);
  EXPECT_DOUBLE_EQ(phi.eta_t(0.9), 0.0);
  EXPECT_NEAR(phi.spatial(0.0, 0.0, g), 2.0, 1e-15);
  EXPECT_NEAR(phi.spatial(1.0, 0.0, g), 0.0, 1e-15);
  EXPECT_NEAR(phi.spatial_dx(1.0, 0.0, g), -std::numbers::pi, 1e-14);
  EXPECT_NEAR(phi.spatial_dy(0.0, 0.5, g), -2.0 * std::numbers::pi, 1e-14);
}

TEST(WeakResidual, SteadyStateSatisfiesIdentities) {
  const Grid g = Grid::rectangle(1, 1, 16, 16);
  const Simulation sim = steady_simulation(g);
  const Trajectory t = advance(sim);
  for (const TestFunctionSpec& phi : {TestFunctionSpec{{{1.0, 1, 0}}, 1.0}, TestFunctionSpec{{{0.7, 2, 3}}, 0.6}}) {
    const WeakResiduals r = weak_residual(t, phi, sim.params, sim.diffusion, g);
    EXPECT_LE(std::abs(r.u), 1e-10);
    EXPECT_LE(std::abs(r.v), 1e-10);
    EXPECT_LE(std::abs(r.w), 1e-10);
  }
}

TEST(WeakResidual, ZeroTestFunctionGivesZero) {
  const Simulation sim = porous_bump(12, 0.3);
  const Trajectory t = advance(sim);
  const WeakResiduals r = weak_residual(t, TestFunctionSpec{{{0.0, 1, 1}}, 0.3}, sim.params, sim.diffusion, sim.grid);
  EXPECT_EQ(r.u, 0.0);
  EXPECT_EQ(r.v, 0.0);
  EXPECT_EQ(r.w, 0.0);
}

TEST(WeakResidual, LinearInTestFunction) {
  const Simulation sim = porous_bump(12, 0.3);
  const Trajectory t = advance(sim);
  auto res = [&](std::vector<CosineMode> modes) {
    return weak_residual(t, TestFunctionSpec{std::move(modes), 0.3}, sim.params, sim.diffusion, sim.grid);
  };
  const WeakResiduals a = res({{1.0, 2, 0}});
  const WeakResiduals b = res({{-2.5, 2, 2}});
  const WeakResiduals ab = res({{1.0, 2, 0}, {-2.5, 2, 2}});
  EXPECT_GT(std::abs(a.u), 1e-8);
  auto tol = [](double x, double y) { return 1e-10 * (std::abs(x) + std::abs(y)) + 1e-14; };
  EXPECT_NEAR(ab.u, a.u + b.u, tol(a.u, b.u));
  EXPECT_NEAR(ab.v, a.v + b.v, tol(a.v, b.v));
  EXPECT_NEAR(ab.w, a.w + b.w, tol(a.w, b.w));
}

TEST(WeakResidual, ContractViolations) {
  const Simulation sim = porous_bump(8, 0.2);
  Trajectory t = advance(sim);
  const TestFunctionSpec late{{{1.0, 1, 0}}, 0.5};
  EXPECT_THROW(weak_residual(t, late, sim.params, sim.diffusion, sim.grid), ContractViolation);
  t.snapshots.erase(t.snapshots.begin() + 1, t.snapshots.end());
  EXPECT_THROW(weak_residual(t, TestFunctionSpec{{{1.0, 1, 0}}, 0.1}, sim.params, sim.diffusion, sim.grid),
               ContractViolation);
}

TEST(ThetaSeries, ConstantDensityGivesDomainMeasure) {
  const Grid g = Grid::rectangle(2.0, 1.5, 6, 4);
  const Trajectory t = constant_trajectory(g, 1.0, 5, 0.1);
  const ThetaSeries s = theta_power_series(t, 2.5, 2.0, g);
  ASSERT_EQ(s.series.size(), 5u);
  for (const auto& x : s.series) EXPECT_NEAR(x.value, 3.0, 1e-14);
  EXPECT_TRUE(s.warnings.empty());
  EXPECT_EQ(theta_power_series(t, 1.5, 4.0, g).warnings.size(), 1u);
}

TEST(SpaceTimeDistance, ConstantOffset) {
  const Grid g = Grid::rectangle(1.0, 2.0, 4, 4);
  const Trajectory a = constant_trajectory(g, 1.0, 11, 0.1);
  const Trajectory b = constant_trajectory(g, 1.5, 11, 0.1);
  EXPECT_EQ(space_time_l2_distance(a, a, g), 0.0);
  EXPECT_NEAR(space_time_l2_distance(a, b, g), std::sqrt(1.0 * 0.25 * 2.0), 1e-14);
  const Trajectory c = constant_trajectory(g, 1.0, 11, 0.2);
  EXPECT_THROW(space_time_l2_distance(a, c, g), ContractViolation);
}

TEST(CauchyVerdict, MonotoneWithSlack) {
  EXPECT_TRUE(cauchy_verdict(std::vector<double>{1.0, 0.5, 0.2}, 0.1));
  EXPECT_TRUE(cauchy_verdict(std::vector<double>{1.0, 1.05}, 0.1));
  EXPECT_FALSE(cauchy_verdict(std::vector<double>{1.0, 1.2}, 0.1));
  EXPECT_FALSE(cauchy_verdict(std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN()}, 0.1));
  EXPECT_TRUE(cauchy_verdict(std::vector<double>{0.0, 0.0}, 0.1));
}

TEST(EpsilonSweep, RepeatedEpsilonGivesZeroDistance) {
  const std::vector<double> eps{0.1, 0.1, 0.1};
  const SweepReport r = epsilon_sweep(porous_bump(12, 0.3), eps, 2, 2);
  ASSERT_EQ(r.distances.size(), 2u);
  EXPECT_EQ(r.distances[0], 0.0);
  EXPECT_EQ(r.distances[1], 0.0);
  EXPECT_TRUE(r.cauchy_pass);
  for (const auto& m : r.members) {
    EXPECT_TRUE(m.ok());
    EXPECT_TRUE(m.report.all_pass());
    ASSERT_TRUE(m.monitor.has_value());
  }
}

TEST(EpsilonSweep, DeterministicAcrossWorkerCounts) {
  const std::vector<double> eps{0.1, 0.03, 0.01};
  const SweepReport a = epsilon_sweep(porous_bump(12, 0.3), eps, 2, 1);
  const SweepReport b = epsilon_sweep(porous_bump(12, 0.3), eps, 2, 3);
  EXPECT_EQ(a.distances, b.distances);
  for (std::size_t k = 0; k < eps.size(); ++k)
    EXPECT_EQ(a.members[k].trajectory.final_state->u, b.members[k].trajectory.final_state->u);
}

TEST(EpsilonSweep, DegenerateDiffusionDistancesShrink) {
  const std::vector<double> eps{1e-1, 1e-2, 1e-3};
  const SweepReport r = epsilon_sweep(porous_bump(16, 0.5), eps, 2, 1);
  ASSERT_EQ(r.distances.size(), 2u);
  EXPECT_GT(r.distances[0], 0.0);
  EXPECT_LT(r.distances[1], r.distances[0]);
  EXPECT_TRUE(r.cauchy_pass);
}

TEST(EpsilonSweep, RejectsBadLists) {
  const Simulation sim = porous_bump(8, 0.1);
  EXPECT_THROW(epsilon_sweep(sim, std::vector<double>{0.1, 0.01}), DomainError);
  EXPECT_THROW(epsilon_sweep(sim, std::vector<double>{0.1, 0.2, 0.01}), DomainError);
  EXPECT_THROW(epsilon_sweep(sim, std::vector<double>{0.1, 0.01, 0.0}), DomainError);
}

TEST(WeakResidual, ShrinksUnderRefinement) {
  auto residual = [](int n, double dt, double sample) {
    const Grid g = Grid::line(1.0, n);
    PresetSpec p;
    p.width = 0.2;
    p.center_x = 0.3;
    p.w0_perturbation = 0.2;
    Simulation sim{g, make_initial_data(p, g), ModelParams{1, 1, 1}, DiffusionSpec{1, 2, 0, 0.1}, StepControls{}};
    sim.controls.t_end = 1.0;
    sim.controls.sample_every = sample;
    sim.controls.dt_max = dt;
    sim.controls.store_snapshots = true;
    const Trajectory t = advance(sim);
    double total = 0.0;
    for (int k = 0; k <= 3; ++k) {
      const WeakResiduals r = weak_residual(t, TestFunctionSpec{{{1.0, k, 0}}, 1.0}, sim.params, sim.diffusion, g);
      total += std::abs(r.u) + std::abs(r.v) + std::abs(r.w);
    }
    return total;
  };
  const double coarse = residual(32, 0.004, 0.02);
  const double fine = residual(64, 0.002, 0.01);
  EXPECT_GE(coarse / fine, 1.8) << coarse << " -> " << fine;
}
