#include <gtest/gtest.h>

#include <cmath>

#include "cht/errors.hpp"
#include "cht/model.hpp"

using namespace cht;

namespace {

DiffusionSpec spec(double delta, double m, double offset = 0.0, double epsilon = 0.0) {
  return DiffusionSpec{delta, m, offset, epsilon};
}

}  // namespace

TEST(EvalDiffusion, QuadraticPowerLawIsIdentity) { EXPECT_DOUBLE_EQ(eval_diffusion(spec(1, 2), 3.0), 3.0); }

TEST(EvalDiffusion, ShiftedPowerLawAtZero) { EXPECT_DOUBLE_EQ(eval_diffusion(spec(1, 2, 0, 0.1), 0.0), 0.1); }

TEST(EvalDiffusion, ScaledSquareRoot) { EXPECT_DOUBLE_EQ(eval_diffusion(spec(2, 1.5), 4.0), 4.0); }

TEST(EvalDiffusion, LinearIsConstantPlusOffset) {
  EXPECT_DOUBLE_EQ(eval_diffusion(spec(1, 1), 0.0), 1.0);
  EXPECT_DOUBLE_EQ(eval_diffusion(spec(0.5, 1, 0.25), 7.0), 0.75);
}

TEST(EvalDiffusion, GeneralExponentUsesPow) {
  EXPECT_NEAR(eval_diffusion(spec(1.5, 2.7, 0.1, 0.2), 1.3), 0.1 + 1.5 * std::pow(1.5, 1.7), 1e-14);
}

TEST(EvalDiffusion, RejectsNegativeAndNonFinite) {
  EXPECT_THROW(eval_diffusion(spec(1, 2), -1e-300), DomainError);
  EXPECT_THROW(eval_diffusion(spec(1, 2), std::nan("")), DomainError);
  EXPECT_THROW(eval_diffusion(spec(1, 2), INFINITY), DomainError);
}

TEST(EvalDiffusion, DominatesPowerLawOnSampledRange) {
  for (const auto& d : {spec(1, 1.5), spec(2, 3, 0.1), spec(0.3, 2, 0, 0.01), spec(1, 1.2, 0.5, 0.5)})
    for (double s = 0.0; s <= 1000.0; s += 0.37)
      EXPECT_GE(eval_diffusion(d, s), d.delta * std::pow(s, d.m - 1.0)) << "s=" << s;
}

TEST(EvalDiffusion, PositiveAtZeroWhenRegularized) {
  const auto d = spec(2, 3, 0, 0.1);
  EXPECT_GE(eval_diffusion(d, 0.0), d.delta * std::pow(d.epsilon, d.m - 1.0));
  EXPECT_GT(eval_diffusion(d, 0.0), 0.0);
}

TEST(Regularize, ReplacesEpsilonOnly) {
  const auto r = regularize(spec(1, 2), 0.5);
  EXPECT_EQ(r, spec(1, 2, 0, 0.5));
  EXPECT_DOUBLE_EQ(eval_diffusion(r, 0.0), 0.5);
}

TEST(Regularize, CubicAtZero) { EXPECT_NEAR(eval_diffusion(regularize(spec(1, 3), 0.1), 0.0), 0.01, 1e-15); }

TEST(Regularize, ShiftsArgumentExactly) {
  const auto base = spec(1.3, 2.4, 0.2);
  const auto reg = regularize(base, 0.03);
  for (double s = 0.0; s < 5.0; s += 0.11) EXPECT_EQ(eval_diffusion(reg, s), eval_diffusion(base, s + 0.03));
}

TEST(Regularize, SmallShiftDominatesOriginal) {
  for (const auto& base : {spec(1, 1.5), spec(1, 2), spec(2, 4, 0.1)}) {
    const auto reg = regularize(base, 1e-4);
    for (double s = 0.0; s < 10.0; s += 0.01) {
      const double value = eval_diffusion(reg, s);
      EXPECT_GE(value, eval_diffusion(base, s));
      EXPECT_NEAR(eval_diffusion(reg, s + 1e-10), value, 1e-6);
    }
  }
}

TEST(Regularize, RejectsNonPositive) {
  EXPECT_THROW(regularize(spec(1, 2), 0.0), DomainError);
  EXPECT_THROW(regularize(spec(1, 2), -1.0), DomainError);
}

TEST(ValidateRegime, PlanarAboveThreshold) {
  const auto v = validate_regime(spec(1, 1.5), 2);
  EXPECT_TRUE(v.within_theorem);
  EXPECT_DOUBLE_EQ(v.threshold, 1.0);
  EXPECT_DOUBLE_EQ(v.margin, 0.5);
}

TEST(ValidateRegime, ThresholdItselfIsExcluded) {
  const auto v = validate_regime(spec(1, 2.0 - 2.0 / 3.0), 3);
  EXPECT_FALSE(v.within_theorem);
  EXPECT_NEAR(v.margin, 0.0, 1e-15);
}

TEST(ValidateRegime, LinearDiffusionInPlane) { EXPECT_FALSE(validate_regime(spec(1, 1), 2).within_theorem); }

TEST(ValidateRegime, VerdictMatchesMarginSign) {
  for (int n : {2, 3, 4})
    for (double m = 1.0; m < 3.0; m += 0.01) {
      const auto v = validate_regime(spec(1, m), n);
      EXPECT_EQ(v.within_theorem, v.margin > 0.0);
    }
}

TEST(ValidateRegime, MonotoneInM) {
  for (int n : {2, 3, 4}) {
    bool seen_within = false;
    for (double m = 1.0; m < 3.0; m += 0.01) {
      const bool within = validate_regime(spec(1, m), n).within_theorem;
      if (seen_within) {
        EXPECT_TRUE(within) << "n=" << n << " m=" << m;
      }
      seen_within = seen_within || within;
    }
  }
}

TEST(Validate, DiffusionSpecRanges) {
  EXPECT_NO_THROW(validate(spec(1, 1)));
  EXPECT_THROW(validate(spec(0, 2)), DomainError);
  EXPECT_THROW(validate(spec(1, 0.5)), DomainError);
  EXPECT_THROW(validate(spec(1, 2, -0.1)), DomainError);
  EXPECT_THROW(validate(spec(1, 2, 0, -0.1)), DomainError);
  EXPECT_THROW(validate(spec(1, INFINITY)), DomainError);
}

TEST(Validate, ModelParamsNonnegativeFinite) {
  EXPECT_NO_THROW(validate(ModelParams{5, 1, 1}));
  EXPECT_THROW(validate(ModelParams{-1, 0, 0}), DomainError);
  EXPECT_THROW(validate(ModelParams{0, std::nan(""), 0}), DomainError);
  EXPECT_THROW(validate(ModelParams{0, 0, INFINITY}), DomainError);
}
