#include "rrt/analysis.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracle.h"
#include "rrt/errors.h"
#include "rrt/estimators.h"

namespace rrt {
namespace {

constexpr double kTol = 1e-12;
const DesignParams kTableDesign(0.6, 0.7);

TEST(VarMangatTest, Examples) {
  EXPECT_NEAR(VarMangat(0.6, 0.1, MangatInput::kTruth, 1000, DenominatorConvention::kN),
              6.9e-4, kTol);
  EXPECT_NEAR(
      VarMangat(0.6, 0.1, MangatInput::kTruth, 1000, DenominatorConvention::kNMinusOne),
      0.2484 / (999 * 0.36), kTol);
  // No randomization: binomial variance.
  EXPECT_NEAR(VarMangat(1.0, 0.3, MangatInput::kTruth, 50, DenominatorConvention::kN),
              0.21 / 50, kTol);
  EXPECT_NEAR(VarMangat(0.6, 0.46, MangatInput::kObservedYesRate, 1000,
                        DenominatorConvention::kN),
              6.9e-4, kTol);
}

TEST(VarMangatTest, RejectsBadInput) {
  EXPECT_THROW(VarMangat(0.0, 0.1, MangatInput::kTruth, 10, DenominatorConvention::kN),
               InvalidParams);
  EXPECT_THROW(
      VarMangat(0.6, 0.1, MangatInput::kTruth, 1, DenominatorConvention::kNMinusOne),
      InvalidParams);
}

TEST(VarProposedTest, Examples) {
  const VarianceTriple v = VarProposed(kTableDesign, ValidateTruth(0.1, 0.1, 0.05), 1);
  EXPECT_NEAR(v.var_ab, 0.14495 / 0.42, kTol);
  EXPECT_NEAR(v.var_a, 0.69, kTol);
  EXPECT_EQ(v.model, ModelId::kProposed);
  const VarianceTriple z = VarProposed(DesignParams(1, 1), ValidateTruth(1, 1, 1), 77);
  EXPECT_NEAR(z.var_a, 0.0, kTol);
  EXPECT_NEAR(z.var_b, 0.0, kTol);
  EXPECT_NEAR(z.var_ab, 0.0, kTol);
}

TEST(VarSimpleTest, Examples) {
  const VarianceTriple v = VarSimple(kTableDesign, ValidateTruth(0.1, 0.1, 0.05), 1);
  EXPECT_NEAR(v.var_a, 6.09, 1e-11);
  EXPECT_NEAR(v.var_ab, 8.65375, 1e-11);
  EXPECT_NEAR(VarSimple(kTableDesign, ValidateTruth(0.1, 0.8, 0.05), 1).var_b, 1.4725,
              1e-11);
  EXPECT_THROW(VarSimple(DesignParams(0.5, 0.7), ValidateTruth(0.1, 0.1, 0.05), 1),
               DegenerateDesign);
}

TEST(VarCrossedTest, Examples) {
  const VarianceTriple v = VarCrossed(kTableDesign, ValidateTruth(0.1, 0.1, 0.05), 1);
  EXPECT_NEAR(v.var_a, 1.602, 1e-11);
  EXPECT_NEAR(v.var_b, 1.062, 1e-11);
  EXPECT_NEAR(v.var_ab, 1.0234259259259259, 1e-11);
  EXPECT_THROW(VarCrossed(DesignParams(0.4, 0.6), ValidateTruth(0.1, 0.1, 0.05), 1),
               DegenerateDesign);
}

TEST(VarianceTest, ScalesAsOneOverN) {
  const PopulationTruth t = ValidateTruth(0.3, 0.2, 0.1);
  const VarianceTriple one = VarProposed(kTableDesign, t, 1);
  const VarianceTriple many = VarProposed(kTableDesign, t, 400);
  EXPECT_NEAR(one.var_ab / 400, many.var_ab, kTol);
  EXPECT_THROW(VarProposed(kTableDesign, t, 0), InvalidParams);
}

TEST(RelativeEfficiencyTest, PublishedSimpleMatchesTableRow) {
  const EfficiencyRecord r = RelativeEfficiency(
      kTableDesign, ValidateTruth(0.1, 0.1, 0.05), Baseline::kSimple,
      EfficiencyMode::kPublished);
  EXPECT_NEAR(r.re_a, 24.52, 0.005);
  EXPECT_NEAR(r.re_b, 6.02, 0.005);
  EXPECT_NEAR(r.re_ab, 25.07, 0.005);
}

TEST(RelativeEfficiencyTest, FormulaConsistentSimple) {
  const EfficiencyRecord r = RelativeEfficiency(
      kTableDesign, ValidateTruth(0.1, 0.1, 0.05), Baseline::kSimple,
      EfficiencyMode::kFormulaConsistent);
  EXPECT_NEAR(r.re_a, 6.09 / 0.69, 1e-10);
}

TEST(RelativeEfficiencyTest, PublishedCrossedMatchesTableRow) {
  const EfficiencyRecord r = RelativeEfficiency(
      kTableDesign, ValidateTruth(0.1, 0.1, 0.05), Baseline::kCrossed,
      EfficiencyMode::kPublished);
  EXPECT_DOUBLE_EQ(RoundHalfUp(r.re_a, 1), 6.4);
  EXPECT_DOUBLE_EQ(RoundHalfUp(r.re_b, 1), 4.6);
  EXPECT_DOUBLE_EQ(RoundHalfUp(r.re_ab, 1), 3.0);
}

TEST(RelativeEfficiencyTest, IndependentOfSampleSize) {
  const PopulationTruth t = ValidateTruth(0.4, 0.3, 0.2);
  const EfficiencyRecord r = RelativeEfficiency(kTableDesign, t, Baseline::kSimple,
                                                EfficiencyMode::kFormulaConsistent);
  for (std::int64_t n : {10, 10000}) {
    const VarianceTriple s = VarSimple(kTableDesign, t, n);
    const VarianceTriple e = VarProposed(kTableDesign, t, n);
    EXPECT_NEAR(s.var_a / e.var_a, r.re_a, 1e-12 * r.re_a);
    EXPECT_NEAR(s.var_ab / e.var_ab, r.re_ab, 1e-12 * r.re_ab);
  }
}

TEST(ThresholdsTest, Examples) {
  const ThresholdReport at6 =
      Thresholds(kTableDesign, ValidateTruth(0.1, 0.1, 0.05));
  EXPECT_NEAR(at6.threshold_a, -8.0, kTol);
  EXPECT_TRUE(at6.satisfied[0]);

  const DesignParams d3(0.3, 0.7);
  const ThresholdReport low = Thresholds(d3, ValidateTruth(0.1, 0.1, 0.05));
  EXPECT_NEAR(low.threshold_a, 0.4375, kTol);
  EXPECT_FALSE(low.satisfied[0]);
  const PopulationTruth t_low = ValidateTruth(0.1, 0.1, 0.05);
  EXPECT_NEAR(VarSimple(d3, t_low, 1).var_a, 1.4025, 1e-11);
  EXPECT_NEAR(VarProposed(d3, t_low, 1).var_a, 2.19, 1e-11);

  const PopulationTruth t_high = ValidateTruth(0.6, 0.1, 0.05);
  EXPECT_TRUE(Thresholds(d3, t_high).satisfied[0]);
  EXPECT_NEAR(VarSimple(d3, t_high, 1).var_a, 1.5525, 1e-11);
  EXPECT_NEAR(VarProposed(d3, t_high, 1).var_a, 0.352 / 0.3, 1e-11);

  EXPECT_THROW(Thresholds(DesignParams(0.5, 0.7), t_low), DegenerateDesign);
  EXPECT_THROW(Thresholds(DesignParams(0.6, 0.5), t_low), DegenerateDesign);
}

TEST(ThresholdsTest, BoundaryIsNotSatisfied) {
  const ThresholdReport r = Thresholds(DesignParams(0.3, 0.7),
                                       ValidateTruth(0.4375, 0.1, 0.05));
  EXPECT_TRUE(r.on_boundary[0]);
  EXPECT_FALSE(r.satisfied[0]);
}

TEST(ThresholdsTest, AbThresholdAbsentWhenDenominatorVanishes) {
  // P lambda = (2P - 1)(2 lambda - 1) at P = 0.2, lambda = 3/7.
  const ThresholdReport r =
      Thresholds(DesignParams(0.2, 3.0 / 7.0), ValidateTruth(0.1, 0.1, 0.05));
  EXPECT_FALSE(r.threshold_ab.has_value());
  EXPECT_FALSE(r.satisfied[2]);
  EXPECT_TRUE(Thresholds(kTableDesign, ValidateTruth(0.1, 0.1, 0.05))
                  .threshold_ab.has_value());
}

TEST(ThresholdsPropertyTest, SignEquivalenceForMargins) {
  for (int pi = 1; pi <= 9; ++pi) {
    if (pi == 5) continue;
    const DesignParams d(pi / 10.0, pi / 10.0);
    for (int k = 1; k < 100; ++k) {
      const double x = k / 100.0;
      const PopulationTruth t = ValidateTruth(x, x, std::max(0.0, 2 * x - 1));
      const ThresholdReport r = Thresholds(d, t);
      if (std::abs(x - r.threshold_a) < 1e-9) continue;
      const double gap_a = VarSimple(d, t, 1).var_a - VarProposed(d, t, 1).var_a;
      const double gap_b = VarSimple(d, t, 1).var_b - VarProposed(d, t, 1).var_b;
      EXPECT_EQ(gap_a > 0, r.satisfied[0]) << "P=" << d.p() << " pi_a=" << x;
      EXPECT_EQ(gap_b > 0, r.satisfied[1]) << "lambda=" << d.lambda() << " pi_b=" << x;
    }
  }
}

TEST(TableGridTest, CrossedLevelTwoTenths) {
  const double level = 0.2;
  const auto rows = TableGrid(kTableDesign, std::span<const double>(&level, 1),
                              EfficiencyMode::kPublished, Baseline::kCrossed,
                              GridRule::kPublishedLayout);
  ASSERT_EQ(rows.size(), 15u);
  EXPECT_DOUBLE_EQ(rows[0].truth.a, 0.2);
  EXPECT_DOUBLE_EQ(rows[0].truth.b, 0.2);
  EXPECT_DOUBLE_EQ(RoundHalfUp(rows[0].re_a, 1), 7.4);
  EXPECT_DOUBLE_EQ(RoundHalfUp(rows[0].re_b, 1), 5.0);
  EXPECT_DOUBLE_EQ(RoundHalfUp(rows[0].re_ab, 1), 3.5);
  EXPECT_DOUBLE_EQ(rows.back().truth.a, 0.6);
  EXPECT_DOUBLE_EQ(rows.back().truth.b, 0.2);
}

TEST(TableGridTest, SimpleLevelFiveHundredths) {
  const double level = 0.05;
  const auto rows = TableGrid(kTableDesign, std::span<const double>(&level, 1),
                              EfficiencyMode::kPublished, Baseline::kSimple,
                              GridRule::kPublishedLayout);
  ASSERT_EQ(rows.size(), 36u);
  EXPECT_DOUBLE_EQ(rows.back().truth.a, 0.8);
  EXPECT_DOUBLE_EQ(rows.back().truth.b, 0.1);
  EXPECT_DOUBLE_EQ(RoundHalfUp(rows.back().re_ab, 2), 21.51);
  for (const auto& r : rows) {
    EXPECT_FALSE(r.truth.a == 0.1 && r.truth.b == 0.9);
    EXPECT_LT(r.truth.a + r.truth.b, 0.99);
  }
}

TEST(TableGridTest, AdmissibleRuleDropsRowsAboveMargins) {
  const double level = 0.2;
  const auto published = TableGrid(kTableDesign, std::span<const double>(&level, 1),
                               EfficiencyMode::kPublished, Baseline::kSimple,
                               GridRule::kPublishedLayout);
  const auto admissible = TableGrid(kTableDesign, std::span<const double>(&level, 1),
                                    EfficiencyMode::kFormulaConsistent,
                                    Baseline::kSimple, GridRule::kAdmissible);
  EXPECT_EQ(published.size(), 36u);
  EXPECT_EQ(admissible.size(), 21u);
  for (const auto& r : admissible) EXPECT_NO_THROW(ValidateTruth(r.truth));
}

TEST(TableGridTest, ThreadCountDoesNotChangeOutput) {
  const std::vector<double> levels{0.05, 0.1, 0.2};
  const auto one = TableGrid(kTableDesign, levels, EfficiencyMode::kPublished,
                             Baseline::kCrossed, GridRule::kPublishedLayout, 1);
  const auto four = TableGrid(kTableDesign, levels, EfficiencyMode::kPublished,
                              Baseline::kCrossed, GridRule::kPublishedLayout, 4);
  ASSERT_EQ(one.size(), four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].re_a, four[i].re_a);
    EXPECT_EQ(one[i].re_ab, four[i].re_ab);
  }
}

TEST(TableGridTest, DegenerateBaselinePropagates) {
  const double level = 0.05;
  EXPECT_THROW(TableGrid(DesignParams(0.5, 0.7), std::span<const double>(&level, 1),
                         EfficiencyMode::kPublished, Baseline::kSimple,
                         GridRule::kPublishedLayout),
               DegenerateDesign);
  EXPECT_THROW(TableGrid(DesignParams(0.4, 0.6), std::span<const double>(&level, 1),
                         EfficiencyMode::kPublished, Baseline::kCrossed,
                         GridRule::kPublishedLayout),
               DegenerateDesign);
}

TEST(RoundHalfUpTest, Basics) {
  EXPECT_DOUBLE_EQ(RoundHalfUp(2.345, 2), 2.35);
  EXPECT_DOUBLE_EQ(RoundHalfUp(4.95, 1), 5.0);
  EXPECT_DOUBLE_EQ(RoundHalfUp(-1.25, 1), -1.3);
  EXPECT_DOUBLE_EQ(RoundHalfUp(7.44, 1), 7.4);
}

TEST(VarianceCurvesTest, SweepOverPiA) {
  SweepSpec s;
  s.axis = SweepAxis::kPiA;
  s.from = 0.1;
  s.to = 0.8;
  s.step = 0.1;
  s.fixed = {0.0, 0.1, 0.05};
  s.target = 0;
  s.n = 1000;
  const auto rows = VarianceCurves(kTableDesign, s);
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_DOUBLE_EQ(rows[0].x, 0.1);
  EXPECT_DOUBLE_EQ(rows[7].x, 0.8);
  EXPECT_NEAR(rows[0].v_proposed, 0.69 / 1000, kTol);
  EXPECT_NEAR(rows[0].v_simple, 6.09 / 1000, kTol);
  // V_SM(pi_A) - V_SM(0.1) follows pi_A(1 - pi_A) - 0.09.
  for (const auto& r : rows) {
    EXPECT_NEAR(r.v_simple - rows[0].v_simple, (r.x * (1 - r.x) - 0.09) / 1000, 1e-12);
  }
}

TEST(VarianceCurvesTest, EmptyAndInadmissibleSweeps) {
  SweepSpec s;
  s.from = 0.5;
  s.to = 0.4;
  s.fixed = {0.0, 0.1, 0.05};
  EXPECT_TRUE(VarianceCurves(kTableDesign, s).empty());
  s.from = 0.0;
  s.to = 0.3;
  EXPECT_THROW(VarianceCurves(kTableDesign, s), AdmissibilityError);
  s.step = 0.0;
  EXPECT_THROW(VarianceCurves(kTableDesign, s), InvalidParams);
}

// Closed forms against the exact per-respondent variance of each affine
// estimator, computed by enumerating the four answer pairs.
TEST(VariancePropertyTest, ClosedFormsEqualExactEstimatorVariance) {
  const std::array<ResponseProfile, 4> vertices{
      ResponseProfile::FromValues(1, 0, 0, 0), ResponseProfile::FromValues(0, 1, 0, 0),
      ResponseProfile::FromValues(0, 0, 1, 0), ResponseProfile::FromValues(0, 0, 0, 1)};
  for (int ip = 1; ip <= 9; ++ip) {
    for (int il = 1; il <= 9; ++il) {
      if (ip == 5 || il == 5) continue;
      const DesignParams d(ip / 10.0, il / 10.0);
      for (const Proportions pi : {Proportions{0.3, 0.2, 0.1}, Proportions{0.1, 0.1, 0.05},
                                   Proportions{0.7, 0.2, 0.15}}) {
        const PopulationTruth t = ValidateTruth(pi);
        std::array<std::array<double, 4>, 3> ea{}, sm{};
        for (int v = 0; v < 4; ++v) {
          const EstimateTriple e = EstimateProposed(vertices[v], d);
          const EstimateTriple s = EstimateSimple(vertices[v], d);
          ea[0][v] = e.pi_a;
          ea[1][v] = e.pi_b;
          ea[2][v] = e.pi_ab;
          sm[0][v] = s.pi_a;
          sm[1][v] = s.pi_b;
          sm[2][v] = s.pi_ab;
        }
        const auto th_ea = ForwardProposed(d, t).values();
        const auto th_sm = ForwardSimple(d, t).values();
        const VarianceTriple ve = VarProposed(d, t, 1);
        const VarianceTriple vs = VarSimple(d, t, 1);
        const std::array<double, 3> got_e{ve.var_a, ve.var_b, ve.var_ab};
        const std::array<double, 3> got_s{vs.var_a, vs.var_b, vs.var_ab};
        for (int k = 0; k < 3; ++k) {
          const double want_e = oracle::EstimatorVariance(th_ea, ea[k]);
          const double want_s = oracle::EstimatorVariance(th_sm, sm[k]);
          EXPECT_NEAR(got_e[k], want_e, 1e-9 * std::max(1.0, want_e));
          EXPECT_NEAR(got_s[k], want_s, 1e-9 * std::max(1.0, want_s));
        }
      }
    }
  }
}

TEST(VariancePropertyTest, MangatMarginIdentity) {
  for (int ip = 1; ip <= 10; ++ip) {
    const double p = ip / 10.0;
    const DesignParams d(p, 0.7);
    for (int k = 0; k <= 10; ++k) {
      const double a = k / 10.0;
      const PopulationTruth t = ValidateTruth(a, 0.0, 0.0);
      const double alpha = MangatAlpha(p, a);
      EXPECT_NEAR(VarProposed(d, t, 1).var_a * p * p, alpha * (1 - alpha), kTol);
    }
  }
}

TEST(VariancePropertyTest, NonNegativeOverAdmissibleGrid) {
  for (int ip = 1; ip <= 9; ++ip) {
    for (int il = 1; il <= 9; ++il) {
      const DesignParams d(ip / 10.0, il / 10.0);
      for (int i = 0; i <= 10; ++i) {
        for (int j = 0; i + j <= 10; ++j) {
          for (int k = 0; k <= std::min(i, j); ++k) {
            const PopulationTruth t = ValidateTruth(i / 10.0, j / 10.0, k / 10.0);
            const VarianceTriple e = VarProposed(d, t, 1);
            EXPECT_GE(e.var_a, -kTol);
            EXPECT_GE(e.var_b, -kTol);
            EXPECT_GE(e.var_ab, -kTol);
            if (ip != 5 && il != 5) {
              const VarianceTriple s = VarSimple(d, t, 1);
              EXPECT_GE(std::min({s.var_a, s.var_b, s.var_ab}), -kTol);
            }
            if (ip + il != 10) {
              const VarianceTriple c = VarCrossed(d, t, 1);
              EXPECT_GE(std::min({c.var_a, c.var_b, c.var_ab}), -kTol);
            }
          }
        }
      }
    }
  }
}

TEST(EfficiencyPropertyTest, PublishedAbEqualsFormulaAb) {
  const std::vector<double> levels{0.05, 0.1, 0.2};
  for (Baseline b : {Baseline::kSimple, Baseline::kCrossed}) {
    const auto pub = TableGrid(kTableDesign, levels, EfficiencyMode::kPublished, b,
                               GridRule::kPublishedLayout);
    const auto fc = TableGrid(kTableDesign, levels, EfficiencyMode::kFormulaConsistent, b,
                              GridRule::kPublishedLayout);
    ASSERT_EQ(pub.size(), fc.size());
    for (std::size_t i = 0; i < pub.size(); ++i) {
      EXPECT_EQ(pub[i].re_ab, fc[i].re_ab);
      EXPECT_NEAR(pub[i].re_a, fc[i].re_a / (0.6 * 0.6), 1e-9 * pub[i].re_a);
      EXPECT_NEAR(pub[i].re_b, fc[i].re_b / (0.7 * 0.7), 1e-9 * pub[i].re_b);
    }
  }
}

}  // namespace
}  // namespace rrt
