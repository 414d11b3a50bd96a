#include "rrt/estimators.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "rrt/errors.h"

namespace rrt {
namespace {

using Theta = std::array<double, 4>;

EstimateTriple Finish(ModelId model, double a, double b, double ab) {
  EstimateTriple out;
  out.pi_a = a;
  out.pi_b = b;
  out.pi_ab = ab;
  out.model = model;
  out.clamped = ClampToAdmissible(out.raw());
  out.was_clamped = out.clamped.a != a || out.clamped.b != b || out.clamped.ab != ab;
  return out;
}

void RequireSimpleDesign(const DesignParams& params) {
  if (params.p() == 0.5) {
    throw DegenerateDesign("simple model requires P != 0.5 (2P - 1 vanishes)");
  }
  if (params.t() == 0.5) {
    throw DegenerateDesign("simple model requires T != 0.5 (2T - 1 vanishes)");
  }
}

void RequireCrossedDesign(const DesignParams& params) {
  if (params.p() + params.t() == 1.0) {
    throw DegenerateDesign("crossed model requires P + T != 1");
  }
}

EstimateTriple Proposed(const Theta& th, const DesignParams& params) {
  const double p = params.p();
  const double l = params.lambda();
  const auto [t11, t10, t01, t00] = th;
  const double a = (t11 + t10 - t01 - t00 + (2.0 * p - 1.0)) / (2.0 * p);
  const double b = (t11 - t10 + t01 - t00 + (2.0 * l - 1.0)) / (2.0 * l);
  const double ab = ((2.0 * p + 2.0 * l - 1.0) * t11 -
                     (2.0 * p - 2.0 * l + 1.0) * t10 +
                     (2.0 * p - 2.0 * l - 1.0) * t01 -
                     (2.0 * p + 2.0 * l - 3.0) * t00 +
                     (2.0 * p - 1.0) * (2.0 * l - 1.0)) /
                    (4.0 * p * l);
  return Finish(ModelId::kProposed, a, b, ab);
}

EstimateTriple Simple(const Theta& th, const DesignParams& params) {
  RequireSimpleDesign(params);
  const double p = params.p();
  const double t = params.t();
  const double sp = 2.0 * p - 1.0;
  const double st = 2.0 * t - 1.0;
  const auto [t11, t10, t01, t00] = th;
  const double a = (t11 + t10 - t01 - t00 + sp) / (2.0 * sp);
  const double b = (t11 - t10 + t01 - t00 + st) / (2.0 * st);
  const double ab = ((p + t) * t11 + (t - p) * t10 + (p - t) * t01 +
                     (2.0 - p - t) * t00 - t * (1.0 - p) - p * (1.0 - t)) /
                    (2.0 * sp * st);
  return Finish(ModelId::kSimple, a, b, ab);
}

EstimateTriple Crossed(const Theta& th, const DesignParams& params) {
  RequireCrossedDesign(params);
  const double p = params.p();
  const double t = params.t();
  const double s = p + t - 1.0;
  const double agree = p * t + (1.0 - p) * (1.0 - t);
  const auto [t11, t10, t01, t00] = th;
  const double a = 0.5 + ((t - p + 1.0) * (t11 - t00) + s * (t10 - t01)) / (2.0 * s);
  const double b = 0.5 + ((t - p + 1.0) * (t11 - t00) + s * (t01 - t10)) / (2.0 * s);
  const double ab = (p * t * t11 - (1.0 - p) * (1.0 - t) * t00) / (agree * s);
  return Finish(ModelId::kCrossed, a, b, ab);
}

}  // namespace

Proportions ClampToAdmissible(const Proportions& raw) {
  Proportions out;
  out.a = std::clamp(raw.a, 0.0, 1.0);
  out.b = std::clamp(raw.b, 0.0, 1.0);
  const double lo = std::max(0.0, out.a + out.b - 1.0);
  const double hi = std::min(out.a, out.b);
  out.ab = std::clamp(raw.ab, lo, hi);
  return out;
}

double EstimateMangat(std::int64_t yes_count, std::int64_t n, double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw InvalidParams("p must lie in (0, 1]");
  }
  if (n < 1) throw InvalidParams("n must be at least 1");
  if (yes_count < 0 || yes_count > n) {
    throw InvalidParams("yes count must lie in [0, n]");
  }
  const double alpha_hat = static_cast<double>(yes_count) / static_cast<double>(n);
  return (alpha_hat - 1.0 + p) / p;
}

EstimateTriple EstimateProposed(const CellCounts& counts,
                                const DesignParams& params) {
  return Proposed(counts.ThetaHat(), params);
}

EstimateTriple EstimateProposed(const ResponseProfile& theta_hat,
                                const DesignParams& params) {
  return Proposed(theta_hat.values(), params);
}

EstimateTriple EstimateSimple(const CellCounts& counts,
                              const DesignParams& params) {
  RequireSimpleDesign(params);
  return Simple(counts.ThetaHat(), params);
}

EstimateTriple EstimateSimple(const ResponseProfile& theta_hat,
                              const DesignParams& params) {
  return Simple(theta_hat.values(), params);
}

EstimateTriple EstimateCrossed(const CellCounts& counts,
                               const DesignParams& params) {
  RequireCrossedDesign(params);
  return Crossed(counts.ThetaHat(), params);
}

EstimateTriple EstimateCrossed(const ResponseProfile& theta_hat,
                               const DesignParams& params) {
  return Crossed(theta_hat.values(), params);
}

EstimateTriple Estimate(ModelId model, const CellCounts& counts,
                        const DesignParams& params) {
  switch (model) {
    case ModelId::kProposed:
      return EstimateProposed(counts, params);
    case ModelId::kSimple:
      return EstimateSimple(counts, params);
    case ModelId::kCrossed:
      return EstimateCrossed(counts, params);
    default:
      throw InvalidParams("model " + std::string(ModelName(model)) +
                          " estimates a single attribute; use EstimateMangat");
  }
}

}  // namespace rrt
