#include "rrt/analysis.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "rrt/errors.h"

namespace rrt {
namespace {

void RequireSimpleDesign(const DesignParams& params) {
  if (params.p() == 0.5 || params.t() == 0.5) {
    throw DegenerateDesign("simple model requires P != 0.5 and T != 0.5");
  }
}

void RequireCrossedDesign(const DesignParams& params) {
  if (params.p() + params.t() == 1.0) {
    throw DegenerateDesign("crossed model requires P + T != 1");
  }
}

void RequireSampleSize(std::int64_t n) {
  if (n < 1) throw InvalidParams("sample size n must be at least 1");
}

VarianceTriple Scale(const std::array<double, 3>& unit, ModelId model,
                     std::int64_t n) {
  const double dn = static_cast<double>(n);
  return VarianceTriple{unit[0] / dn, unit[1] / dn, unit[2] / dn, model, n};
}

// Variance of the yes rate for a Mangat device, per respondent.
double YesRateVariance(double p, double pi) {
  const double alpha = 1.0 - p + p * pi;
  return alpha * (1.0 - alpha);
}

std::array<double, 3> Baseline3(const DesignParams& params, const Proportions& pi,
                                Baseline baseline) {
  return baseline == Baseline::kSimple ? unit_variance::Simple(params, pi)
                                       : unit_variance::Crossed(params, pi);
}

}  // namespace

double VarMangat(double p, double value, MangatInput input, std::int64_t n,
                 DenominatorConvention convention) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidParams("p must lie in (0, 1]");
  const double alpha =
      input == MangatInput::kTruth ? MangatAlpha(p, value) : value;
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InvalidParams("yes rate must lie in [0, 1]");
  }
  double d = 0.0;
  if (convention == DenominatorConvention::kNMinusOne) {
    if (n < 2) throw InvalidParams("n - 1 convention requires n >= 2");
    d = static_cast<double>(n - 1);
  } else {
    RequireSampleSize(n);
    d = static_cast<double>(n);
  }
  return alpha * (1.0 - alpha) / (d * p * p);
}

namespace unit_variance {

std::array<double, 3> Proposed(const DesignParams& params, const Proportions& pi) {
  const double p = params.p();
  const double l = params.lambda();
  const double va = (pi.a * ((2.0 * p - 1.0) - p * pi.a) + (1.0 - p)) / p;
  const double vb = (pi.b * ((2.0 * l - 1.0) - l * pi.b) + (1.0 - l)) / l;
  const double vab = (pi.ab * ((2.0 * p - 1.0) * (2.0 * l - 1.0) - p * l * pi.ab) +
                      (2.0 * p - 1.0) * (1.0 - l) * pi.a +
                      (1.0 - p) * (2.0 * l - 1.0) * pi.b + (1.0 - p) * (1.0 - l)) /
                     (p * l);
  return {va, vb, vab};
}

std::array<double, 3> Simple(const DesignParams& params, const Proportions& pi) {
  RequireSimpleDesign(params);
  const double p = params.p();
  const double t = params.t();
  const double sp2 = (2.0 * p - 1.0) * (2.0 * p - 1.0);
  const double st2 = (2.0 * t - 1.0) * (2.0 * t - 1.0);
  const double va = pi.a * (1.0 - pi.a) + p * (1.0 - p) / sp2;
  const double vb = pi.b * (1.0 - pi.b) + t * (1.0 - t) / st2;
  const double vab = pi.ab * (1.0 - pi.ab) +
                     (sp2 * t * (1.0 - t) * pi.a + p * (1.0 - p) * st2 * pi.b +
                      p * t * (1.0 - p) * (1.0 - t)) /
                         (sp2 * st2);
  return {va, vb, vab};
}

std::array<double, 3> Crossed(const DesignParams& params, const Proportions& pi) {
  RequireCrossedDesign(params);
  const double p = params.p();
  const double t = params.t();
  const double s2 = (p + t - 1.0) * (p + t - 1.0);
  const double agree = p * t + (1.0 - p) * (1.0 - t);
  const double disagree_cells = 1.0 - pi.a - pi.b + 2.0 * pi.ab;
  const double va = pi.a * (1.0 - pi.a) + (1.0 - p) * t * agree * disagree_cells / s2;
  const double vb = pi.b * (1.0 - pi.b) + (1.0 - t) * p * agree * disagree_cells / s2;
  const double vab =
      pi.ab * (1.0 - pi.ab) +
      (pi.ab * (p * p * t * t + (1.0 - p) * (1.0 - p) * (1.0 - t) * (1.0 - t) -
                agree * s2) +
       p * t * (1.0 - p) * (1.0 - t) * (1.0 - pi.a - pi.b)) /
          (agree * s2);
  return {va, vb, vab};
}

}  // namespace unit_variance

VarianceTriple VarProposed(const DesignParams& params,
                           const PopulationTruth& truth, std::int64_t n) {
  RequireSampleSize(n);
  return Scale(unit_variance::Proposed(params, truth.proportions()),
               ModelId::kProposed, n);
}

VarianceTriple VarSimple(const DesignParams& params,
                         const PopulationTruth& truth, std::int64_t n) {
  RequireSampleSize(n);
  return Scale(unit_variance::Simple(params, truth.proportions()),
               ModelId::kSimple, n);
}

VarianceTriple VarCrossed(const DesignParams& params,
                          const PopulationTruth& truth, std::int64_t n) {
  RequireSampleSize(n);
  return Scale(unit_variance::Crossed(params, truth.proportions()),
               ModelId::kCrossed, n);
}

std::string_view BaselineName(Baseline baseline) {
  return baseline == Baseline::kSimple ? "simple" : "crossed";
}

std::string_view ModeName(EfficiencyMode mode) {
  return mode == EfficiencyMode::kPublished ? "published" : "formula";
}

std::optional<Baseline> ParseBaseline(std::string_view name) {
  if (name == "simple") return Baseline::kSimple;
  if (name == "crossed") return Baseline::kCrossed;
  return std::nullopt;
}

std::optional<EfficiencyMode> ParseMode(std::string_view name) {
  if (name == "published") return EfficiencyMode::kPublished;
  if (name == "formula") return EfficiencyMode::kFormulaConsistent;
  return std::nullopt;
}

EfficiencyRecord RelativeEfficiencyAt(const DesignParams& params,
                                      const Proportions& pi, Baseline baseline,
                                      EfficiencyMode mode) {
  const std::array<double, 3> base = Baseline3(params, pi, baseline);
  std::array<double, 3> proposed = unit_variance::Proposed(params, pi);
  if (mode == EfficiencyMode::kPublished) {
    proposed[0] = YesRateVariance(params.p(), pi.a);
    proposed[1] = YesRateVariance(params.lambda(), pi.b);
  }
  EfficiencyRecord rec;
  rec.truth = pi;
  rec.re_a = base[0] / proposed[0];
  rec.re_b = base[1] / proposed[1];
  rec.re_ab = base[2] / proposed[2];
  rec.mode = mode;
  rec.baseline = baseline;
  return rec;
}

EfficiencyRecord RelativeEfficiency(const DesignParams& params,
                                    const PopulationTruth& truth,
                                    Baseline baseline, EfficiencyMode mode) {
  return RelativeEfficiencyAt(params, truth.proportions(), baseline, mode);
}

ThresholdReport Thresholds(const DesignParams& params,
                           const PopulationTruth& truth) {
  const double p = params.p();
  const double l = params.lambda();
  if (p == 0.5 || l == 0.5) {
    throw DegenerateDesign("efficiency thresholds require P != 0.5 and lambda != 0.5");
  }
  const double sp = 2.0 * p - 1.0;
  const double sl = 2.0 * l - 1.0;

  ThresholdReport report;
  report.threshold_a = (3.0 * p - 1.0) * (p - 1.0) / (sp * sp);
  report.threshold_b = (3.0 * l - 1.0) * (l - 1.0) / (sl * sl);

  const double gap = p * l - sp * sl;
  if (std::abs(gap) > kProbabilityTolerance) {
    const double num =
        sp * sp * (1.0 - l) * truth.pi_a() * (sp * sl * sl - p * l * l) +
        (1.0 - p) * sl * sl * truth.pi_b() * (sp * sp * sl - p * p * l);
    report.threshold_ab = num / (sp * sp * sl * sl * gap);
  }

  auto judge = [&](int i, double value, std::optional<double> threshold) {
    if (!threshold) return;
    if (std::abs(value - *threshold) <= kProbabilityTolerance) {
      report.on_boundary[i] = true;
      return;
    }
    report.satisfied[i] = value > *threshold;
  };
  judge(0, truth.pi_a(), report.threshold_a);
  judge(1, truth.pi_b(), report.threshold_b);
  judge(2, truth.pi_ab(), report.threshold_ab);
  return report;
}

std::string_view GridRuleName(GridRule rule) {
  return rule == GridRule::kPublishedLayout ? "published" : "admissible";
}

std::optional<GridRule> ParseGridRule(std::string_view name) {
  if (name == "published") return GridRule::kPublishedLayout;
  if (name == "admissible") return GridRule::kAdmissible;
  return std::nullopt;
}

GridRule DefaultGridRule(EfficiencyMode mode) {
  return mode == EfficiencyMode::kPublished ? GridRule::kPublishedLayout
                                            : GridRule::kAdmissible;
}

std::vector<EfficiencyRecord> TableGrid(const DesignParams& params,
                                        std::span<const double> pi_ab_levels,
                                        EfficiencyMode mode, Baseline baseline,
                                        GridRule rule, int threads) {
  if (baseline == Baseline::kSimple) {
    RequireSimpleDesign(params);
  } else {
    RequireCrossedDesign(params);
  }
  for (double level : pi_ab_levels) {
    if (!(level >= 0.0 && level <= 1.0)) {
      throw InvalidParams("pi_ab level " + std::to_string(level) +
                          " is outside [0, 1]");
    }
  }

  std::vector<Proportions> points;
  for (double level : pi_ab_levels) {
    for (int i = 1; i <= 9; ++i) {
      for (int j = 1; i + j <= 9; ++j) {  // pi_A + pi_B < 0.99
        const Proportions pi{i / 10.0, j / 10.0, level};
        const bool within_margins =
            level <= std::min(pi.a, pi.b) + kProbabilityTolerance;
        bool keep = true;
        if (rule == GridRule::kAdmissible) {
          keep = within_margins;
        } else if (baseline == Baseline::kCrossed) {
          keep = within_margins &&
                 pi.a + pi.b + level <= 1.0 + kProbabilityTolerance;
        }
        if (keep) points.push_back(pi);
      }
    }
  }

  std::vector<EfficiencyRecord> out(points.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      out[k] = RelativeEfficiencyAt(params, points[k], baseline, mode);
    }
  };
  const std::size_t workers =
      std::clamp<std::size_t>(threads < 1 ? 1 : threads, 1, points.size() + 1);
  if (workers <= 1) {
    work(0, points.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (points.size() + workers - 1) / workers;
    for (std::size_t begin = 0; begin < points.size(); begin += chunk) {
      pool.emplace_back(work, begin, std::min(points.size(), begin + chunk));
    }
  }
  return out;
}

int TableDecimals(Baseline baseline) {
  return baseline == Baseline::kSimple ? 2 : 1;
}

double RoundHalfUp(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double scaled = std::abs(value) * scale;
  const double rounded = std::floor(scaled + 0.5) / scale;
  return std::copysign(rounded, value);
}

std::vector<double> SweepPoints(double from, double to, double step) {
  if (!(step > 0.0)) throw InvalidParams("sweep step must be positive");
  std::vector<double> xs;
  if (to < from) return xs;
  const double span = (to - from) / step;
  const auto count = static_cast<std::int64_t>(std::floor(span * (1.0 + 1e-9) + 1e-9)) + 1;
  xs.reserve(static_cast<std::size_t>(count));
  for (std::int64_t k = 0; k < count; ++k) {
    const double x = from + static_cast<double>(k) * step;
    xs.push_back(std::round(x * 1e12) / 1e12);
  }
  return xs;
}

std::vector<VarianceCurveRow> VarianceCurves(const DesignParams& params,
                                             const SweepSpec& sweep) {
  if (sweep.target < 0 || sweep.target > 2) {
    throw InvalidParams("curve target must be 0 (pi_a), 1 (pi_b) or 2 (pi_ab)");
  }
  RequireSampleSize(sweep.n);
  std::vector<VarianceCurveRow> rows;
  for (double x : SweepPoints(sweep.from, sweep.to, sweep.step)) {
    Proportions pi = sweep.fixed;
    switch (sweep.axis) {
      case SweepAxis::kPiA:
        pi.a = x;
        break;
      case SweepAxis::kPiB:
        pi.b = x;
        break;
      case SweepAxis::kPiAB:
        pi.ab = x;
        break;
    }
    const PopulationTruth truth = ValidateTruth(pi);
    const int k = sweep.target;
    const VarianceTriple sm = VarSimple(params, truth, sweep.n);
    const VarianceTriple cm = VarCrossed(params, truth, sweep.n);
    const VarianceTriple ea = VarProposed(params, truth, sweep.n);
    auto pick = [k](const VarianceTriple& v) {
      return k == 0 ? v.var_a : (k == 1 ? v.var_b : v.var_ab);
    };
    rows.push_back({x, pick(sm), pick(cm), pick(ea)});
  }
  return rows;
}

}  // namespace rrt
