#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cht/errors.hpp"
#include "cht/monitor.hpp"
#include "cht/presets.hpp"

using namespace cht;

namespace {

constexpr double kPi = std::numbers::pi;

TimeSeries series_of(std::size_t n, auto&& f) {
  TimeSeries s;
  for (std::size_t k = 0; k < n; ++k) s.push_back({0.1 * static_cast<double>(k), f(k)});
  return s;
}

}  // namespace

TEST(MassStar, TakesLargerOfMeasureAndMass) {
  const Grid g = Grid::rectangle(2.0, 1.0, 8, 4);
  EXPECT_DOUBLE_EQ(mass_star(Field(g, 0.25), g), 2.0);
  EXPECT_DOUBLE_EQ(mass_star(Field(g, 3.0), g), 6.0);
}

TEST(MassBound, PassesBelowAndFailsAbove) {
  const TimeSeries ok = series_of(5, [](std::size_t k) { return 1.0 + 0.1 * k; });
  const InvariantEntry a = check_mass_bound(ok, 1.4, 1.0, 1e-8);
  EXPECT_TRUE(a.pass);
  EXPECT_EQ(a.check, "mass_bound");
  EXPECT_NEAR(a.worst_slack, 0.0, 1e-15);
  const InvariantEntry b = check_mass_bound(ok, 1.3, 1.0, 1e-8);
  EXPECT_FALSE(b.pass);
  EXPECT_NEAR(b.worst_slack, 0.1, 1e-12);
  EXPECT_DOUBLE_EQ(b.t_worst, 0.4);
}

TEST(MassBound, ConservationWhenMuVanishes) {
  const TimeSeries drift = series_of(4, [](std::size_t k) { return 2.0 + 1e-13 * k; });
  const InvariantEntry e = check_mass_bound(drift, 100.0, 0.0, 1e-12);
  EXPECT_EQ(e.check, "mass_conservation");
  EXPECT_TRUE(e.pass);
  const TimeSeries lost = series_of(4, [](std::size_t k) { return 2.0 - 1e-3 * k; });
  EXPECT_FALSE(check_mass_bound(lost, 100.0, 0.0, 1e-12).pass);
  EXPECT_THROW(check_mass_bound(TimeSeries{}, 1.0, 1.0, 0.0), ContractViolation);
}

TEST(ComputeK, ConstantMatrix) {
  const Grid g = Grid::rectangle(1, 1, 8, 8);
  EXPECT_NEAR(compute_K(Field(g, 1.0), g), 1.0 / std::numbers::e, 1e-15);
  EXPECT_NEAR(compute_K(Field(g, 3.5), g), 3.5 / std::numbers::e, 1e-15);
}

TEST(ComputeK, ApproachesContinuumValueOnFineGrid) {
  const Grid g = Grid::line(1.0, 1024);
  const Field w0 = Field::from_function(g, [](double x, double) { return 1.0 + 0.5 * std::cos(kPi * x); });
  // ||w0''|| + max w0'^2 / w0 + ||w0|| / e, the middle term sampled densely.
  double grad_term = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    const double x = i / 100000.0;
    const double d = 0.5 * kPi * std::sin(kPi * x);
    grad_term = std::max(grad_term, d * d / (1.0 + 0.5 * std::cos(kPi * x)));
  }
  const double exact = 0.5 * kPi * kPi + grad_term + 1.5 / std::numbers::e;
  EXPECT_NEAR(compute_K(w0, g), exact, 0.01 * exact);
}

TEST(ComputeK, RejectsNonPositiveMatrix) {
  const Grid g = Grid::line(1.0, 4);
  Field w0(g, 1.0);
  w0[2] = 0.0;
  EXPECT_THROW(compute_K(w0, g), DomainError);
}

TEST(NegLaplacianW, HoldsForInitialMatrix) {
  const Grid g = Grid::rectangle(1, 1, 32, 32);
  const Field w0 = Field::from_function(g, [](double x, double y) { return 1.0 + 0.25 * std::cos(kPi * x) * std::cos(kPi * y); });
  const double K = compute_K(w0, g);
  const State s(0.0, Field(g, 1.0), Field(g), w0);
  const InvariantEntry e = check_neg_laplacian_w(s, w0, K, 1e-8, g);
  EXPECT_TRUE(e.pass);
  EXPECT_LE(e.worst_slack, 0.0);
  EXPECT_DOUBLE_EQ(e.bound, K + 1.0);
}

TEST(NegLaplacianW, FlagsSharpPeakWithoutEnzyme) {
  const Grid g = Grid::line(1.0, 16);
  Field w(g, 1.0);
  w[8] = 2.0;
  const State s(0.5, Field(g, 1.0), Field(g), w);
  const InvariantEntry e = check_neg_laplacian_w(s, Field(g, 1.0), 1.0 / std::numbers::e, 1e-8, g);
  EXPECT_FALSE(e.pass);
  EXPECT_NEAR(e.worst_slack, 2.0 * 256.0 - 1.0 / std::numbers::e, 1e-9);
  EXPECT_DOUBLE_EQ(e.t_worst, 0.5);
  EXPECT_NE(e.details.find("worst cell 8"), std::string::npos);
}

TEST(FunctionalY, ConstantPlusCosineGradient) {
  const Grid g = Grid::rectangle(1, 1, 256, 4);
  const Field u(g, 2.0);
  const Field v = Field::from_function(g, [](double x, double) { return std::cos(kPi * x); });
  EXPECT_NEAR(functional_y(u, v, 2.0, 1.0, g), 4.0 + kPi * kPi / 2.0, 1e-3);
  EXPECT_NEAR(functional_y(u, Field(g, 7.0), 3.0, 2.0, g), 8.0, 1e-12);
}

TEST(GradLpNorm, CosineL2) {
  const Grid g = Grid::line(1.0, 512);
  const Field v = Field::from_function(g, [](double x, double) { return std::cos(kPi * x); });
  EXPECT_NEAR(grad_lp_norm(v, 2.0, g), kPi / std::sqrt(2.0), 1e-3);
  EXPECT_DOUBLE_EQ(grad_lp_norm(Field(g, 3.0), 1.5, g), 0.0);
}

TEST(BoundednessVerdict, ConstantIsBounded) {
  EXPECT_EQ(boundedness_verdict(series_of(40, [](std::size_t) { return 3.0; }), 0.25), Verdict::Bounded);
}

TEST(BoundednessVerdict, DoublingIsGrowing) {
  EXPECT_EQ(boundedness_verdict(series_of(20, [](std::size_t k) { return std::ldexp(1.0, static_cast<int>(k)); }), 0.25),
            Verdict::Growing);
}

TEST(BoundednessVerdict, TooShortIsInconclusive) {
  EXPECT_EQ(boundedness_verdict(series_of(9, [](std::size_t) { return 1.0; }), 0.25), Verdict::Inconclusive);
}

TEST(BoundednessVerdict, ModestGrowthIsInconclusive) {
  EXPECT_EQ(boundedness_verdict(series_of(40, [](std::size_t k) { return 1.0 + 0.02 * k; }), 0.25),
            Verdict::Inconclusive);
}

TEST(BoundednessVerdict, InvariantUnderRescaling) {
  auto f = [](std::size_t k) { return 1.0 + std::sin(0.3 * k) + 0.01 * k * k; };
  const TimeSeries a = series_of(50, f);
  const TimeSeries b = series_of(50, [&](std::size_t k) { return 1e6 * f(k); });
  EXPECT_EQ(boundedness_verdict(a, 0.25), boundedness_verdict(b, 0.25));
  EXPECT_EQ(boundedness_verdict(series_of(50, [](std::size_t k) { return std::exp(-0.1 * k); }), 0.25),
            Verdict::Bounded);
}

TEST(MoserLadder, LinearDiffusionDoubles) {
  const auto ladder = moser_ladder(3.0, 1.0, 5);
  for (std::size_t k = 0; k < ladder.size(); ++k) EXPECT_DOUBLE_EQ(ladder[k], 3.0 * std::ldexp(1.0, static_cast<int>(k)));
  EXPECT_EQ(moser_ladder(2.0, 1.5, 4), (std::vector<double>{2.0, 3.5, 6.5, 12.5}));
}

TEST(DefaultMonitorConfig, PorousMediumInTwoDimensions) {
  const MonitorConfig c = default_monitor_config(DiffusionSpec{1, 1.5, 0, 0}, 2);
  EXPECT_EQ(c.p_list, (std::vector<double>{2.0, 3.5, 6.5, 12.5}));
  EXPECT_EQ(c.q_list, (std::vector<double>(4, 2.0)));
  ASSERT_EQ(c.s_list.size(), 1u);
  EXPECT_GE(c.s_list[0], 1.0);
  EXPECT_LT(c.s_list[0], 2.0);
  EXPECT_DOUBLE_EQ(c.theta, 1.5);
  EXPECT_NO_THROW(validate(c));
  const MonitorConfig c3 = default_monitor_config(DiffusionSpec{1, 4.0, 0, 0}, 3);
  EXPECT_LT(c3.s_list[0], 1.5);
  EXPECT_DOUBLE_EQ(c3.theta, 2.5);
}

TEST(MonitorConfigValidation, RejectsBadExponents) {
  MonitorConfig c = default_monitor_config(DiffusionSpec{}, 2);
  c.q_list.pop_back();
  EXPECT_THROW(validate(c), DomainError);
  c = default_monitor_config(DiffusionSpec{}, 2);
  c.p_list[0] = 1.0;
  EXPECT_THROW(validate(c), DomainError);
  c = default_monitor_config(DiffusionSpec{}, 2);
  c.s_list = {0.5};
  EXPECT_THROW(validate(c), DomainError);
  c = default_monitor_config(DiffusionSpec{}, 2);
  c.window_fraction = 1.0;
  EXPECT_THROW(validate(c), DomainError);
  c = default_monitor_config(DiffusionSpec{}, 2);
  c.theta = 0.9;
  EXPECT_THROW(validate(c), DomainError);
}

TEST(SemigroupSeries, EvaluatesSnapshotsAndWarnsOutsideRange) {
  const Grid g = Grid::rectangle(1, 1, 16, 16);
  StepControls c;
  c.t_end = 0.2;
  c.sample_every = 0.05;
  c.store_snapshots = true;
  PresetSpec p;
  const Trajectory t = advance(make_initial_data(p, g), ModelParams{1, 1, 1}, DiffusionSpec{1, 1.5, 0, 0}, c, g);
  const std::vector<double> s{1.5, 2.0};
  const NormSeries ns = semigroup_norm_series(t, s, 2, g);
  ASSERT_EQ(ns.series.size(), 2u);
  EXPECT_EQ(ns.series[0].size(), 5u);
  EXPECT_EQ(ns.warnings.size(), 1u);
  EXPECT_DOUBLE_EQ(ns.series[1][3].value, grad_lp_norm(t.snapshots[3].v, 2.0, g));
}

TEST(Monitor, SteadyRunPassesEverything) {
  const Grid g = Grid::rectangle(1, 1, 16, 16);
  const InitialData init{Field(g, 1.0), Field(g, 1.0), Field(g, 1e-12)};
  const ModelParams params{5, 1, 1};
  const DiffusionSpec d{1, 1.5, 0, 0};
  Monitor mon(default_monitor_config(d, 2), init, params, d, 2, g);
  StepControls c;
  c.t_end = 2.0;
  const SampleHook hooks[] = {mon.hook()};
  const Trajectory t = advance(init, params, d, c, g, hooks);
  const InvariantReport rep = mon.report(t);
  EXPECT_TRUE(rep.all_pass());
  ASSERT_NE(rep.find("neg_laplacian_w"), nullptr);
  EXPECT_EQ(rep.find("nonexistent"), nullptr);
  EXPECT_DOUBLE_EQ(mon.m_star(), 1.0);
  EXPECT_TRUE(mon.regime().within_theorem);
  EXPECT_TRUE(mon.warnings().empty());
  for (const auto& v : mon.verdicts()) EXPECT_EQ(v.verdict, Verdict::Bounded) << v.series;
  EXPECT_EQ(mon.linf_u().size(), 21u);
  EXPECT_EQ(mon.y_label(1), "y_p3.5_q2");
}

TEST(Monitor, WarnsOutsideRegime) {
  const Grid g = Grid::line(1.0, 8);
  const InitialData init{Field(g, 1.0), Field(g, 1.0), Field(g, 1.0)};
  const DiffusionSpec d{1, 1.2, 0, 0};
  const Monitor mon(default_monitor_config(d, 3), init, ModelParams{}, d, 3, g);
  EXPECT_FALSE(mon.regime().within_theorem);
  EXPECT_EQ(mon.warnings().size(), 1u);
}
