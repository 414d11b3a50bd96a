#ifndef RRT_ANALYSIS_H_
#define RRT_ANALYSIS_H_

// Closed-form variances, relative efficiencies, efficiency thresholds and the
// relative-efficiency table grids.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rrt/core.h"

namespace rrt {

struct VarianceTriple {
  double var_a = 0.0;
  double var_b = 0.0;
  double var_ab = 0.0;
  ModelId model = ModelId::kProposed;
  std::int64_t n = 1;
};

enum class DenominatorConvention {
  kN,          // alpha(1 - alpha) / (n P^2)
  kNMinusOne,  // alpha_hat(1 - alpha_hat) / ((n - 1) P^2)
};

// Whether VarMangat's `value` is a population proportion pi (alpha is then
// derived through MangatAlpha) or an observed yes rate alpha_hat.
enum class MangatInput { kTruth, kObservedYesRate };

double VarMangat(double p, double value, MangatInput input, std::int64_t n,
                 DenominatorConvention convention);

// Per-respondent (n = 1) closed forms evaluated at raw coordinates without an
// admissibility check. The checked Var* functions below divide these by n.
namespace unit_variance {

// Throws InvalidParams only through DesignParams; never degenerate.
std::array<double, 3> Proposed(const DesignParams& params, const Proportions& pi);
// Throws DegenerateDesign when P = 0.5 or T = 0.5.
std::array<double, 3> Simple(const DesignParams& params, const Proportions& pi);
// Throws DegenerateDesign when P + T = 1.
std::array<double, 3> Crossed(const DesignParams& params, const Proportions& pi);

}  // namespace unit_variance

VarianceTriple VarProposed(const DesignParams& params,
                           const PopulationTruth& truth, std::int64_t n);
VarianceTriple VarSimple(const DesignParams& params,
                         const PopulationTruth& truth, std::int64_t n);
VarianceTriple VarCrossed(const DesignParams& params,
                          const PopulationTruth& truth, std::int64_t n);

enum class Baseline { kSimple, kCrossed };

// kFormulaConsistent divides the baseline variance by the proposed design's
// own closed forms. kPublished replaces the proposed A and B variances by the
// yes-rate variances alpha(1 - alpha) and beta(1 - beta), i.e. omits their
// 1/P^2 and 1/lambda^2 factors. The AB column is identical in both modes.
enum class EfficiencyMode { kPublished, kFormulaConsistent };

std::string_view BaselineName(Baseline baseline);
std::string_view ModeName(EfficiencyMode mode);
std::optional<Baseline> ParseBaseline(std::string_view name);
std::optional<EfficiencyMode> ParseMode(std::string_view name);

struct EfficiencyRecord {
  Proportions truth;
  double re_a = 0.0;
  double re_b = 0.0;
  double re_ab = 0.0;
  EfficiencyMode mode = EfficiencyMode::kFormulaConsistent;
  Baseline baseline = Baseline::kSimple;
};

// Ratio of baseline variance to proposed variance, component-wise. The ratio
// does not depend on n, so none is taken.
EfficiencyRecord RelativeEfficiency(const DesignParams& params,
                                    const PopulationTruth& truth,
                                    Baseline baseline, EfficiencyMode mode);

// Same ratios at raw coordinates; used by grids that reproduce rows where
// pi_AB exceeds a margin.
EfficiencyRecord RelativeEfficiencyAt(const DesignParams& params,
                                      const Proportions& pi, Baseline baseline,
                                      EfficiencyMode mode);

// Conditions under which the proposed estimators beat the simple-model ones:
// pi_A > threshold_a, pi_B > threshold_b, pi_AB > threshold_ab(pi_A, pi_B).
// Comparisons are strict; a truth within kProbabilityTolerance of a threshold
// is flagged on_boundary and reported as not satisfied. threshold_ab is
// absent when its denominator P lambda - (2P - 1)(2 lambda - 1) vanishes.
struct ThresholdReport {
  double threshold_a = 0.0;
  double threshold_b = 0.0;
  std::optional<double> threshold_ab;
  std::array<bool, 3> satisfied{false, false, false};
  std::array<bool, 3> on_boundary{false, false, false};
};

// Throws DegenerateDesign when P = 0.5 or lambda = 0.5.
ThresholdReport Thresholds(const DesignParams& params,
                           const PopulationTruth& truth);

// Which (pi_A, pi_B) pairs of the 0.1-step grid enter a table.
//
// kAdmissible: pi_AB <= min(pi_A, pi_B) and pi_A + pi_B < 0.99.
// kPublishedLayout: the published table layouts. For the simple baseline
//   every pair with pi_A + pi_B < 0.99 is emitted at every level, even where
//   pi_AB exceeds a margin. For the crossed baseline a pair is kept when
//   pi_AB <= min(pi_A, pi_B) and pi_A + pi_B + pi_AB <= 1.
enum class GridRule { kPublishedLayout, kAdmissible };

std::string_view GridRuleName(GridRule rule);
std::optional<GridRule> ParseGridRule(std::string_view name);
GridRule DefaultGridRule(EfficiencyMode mode);

// One record per (level, pi_A, pi_B) in level-major, then row-major
// (pi_A, pi_B) order. `threads` only changes how the work is split.
std::vector<EfficiencyRecord> TableGrid(const DesignParams& params,
                                        std::span<const double> pi_ab_levels,
                                        EfficiencyMode mode, Baseline baseline,
                                        GridRule rule, int threads = 1);

// Decimal places used when rendering a table for a baseline: 2 for simple,
// 1 for crossed.
int TableDecimals(Baseline baseline);

// Rounds half away from zero at `decimals` places.
double RoundHalfUp(double value, int decimals);

enum class SweepAxis { kPiA, kPiB, kPiAB };

struct SweepSpec {
  SweepAxis axis = SweepAxis::kPiA;
  double from = 0.1;
  double to = 0.9;
  double step = 0.1;
  // Values for the coordinates that are not swept.
  Proportions fixed;
  // Which estimator's variance is reported: 0 = pi_A, 1 = pi_B, 2 = pi_AB.
  int target = 0;
  std::int64_t n = 1;
};

struct VarianceCurveRow {
  double x = 0.0;
  double v_simple = 0.0;
  double v_crossed = 0.0;
  double v_proposed = 0.0;
};

// from, from + step, ..., up to `to` inclusive (with a 1e-9 relative slack).
// Empty when to < from. Throws InvalidParams on a non-positive step.
std::vector<double> SweepPoints(double from, double to, double step);

// Throws AdmissibilityError at the first inadmissible sweep point and
// DegenerateDesign where a baseline design is degenerate.
std::vector<VarianceCurveRow> VarianceCurves(const DesignParams& params,
                                             const SweepSpec& sweep);

}  // namespace rrt

#endif  // RRT_ANALYSIS_H_
