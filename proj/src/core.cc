#include "rrt/core.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "rrt/errors.h"

namespace rrt {
namespace {

// Shortest text that round-trips to v.
std::string Describe(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Snaps values within tolerance of [0, 1] onto the interval.
double SnapUnit(double v) {
  if (v < 0.0 && v >= -kProbabilityTolerance) return 0.0;
  if (v > 1.0 && v <= 1.0 + kProbabilityTolerance) return 1.0;
  return v;
}

void RequireUnit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw AdmissibilityError(std::string(name) + " = " + Describe(v) +
                             " is outside [0, 1]");
  }
}

}  // namespace

std::string_view ModelName(ModelId model) {
  switch (model) {
    case ModelId::kMangatSingleA:
      return "mangat-a";
    case ModelId::kMangatSingleB:
      return "mangat-b";
    case ModelId::kSimple:
      return "simple";
    case ModelId::kCrossed:
      return "crossed";
    case ModelId::kProposed:
      return "proposed";
  }
  return "unknown";
}

std::optional<ModelId> ParseModel(std::string_view name) {
  for (ModelId m : {ModelId::kMangatSingleA, ModelId::kMangatSingleB,
                    ModelId::kSimple, ModelId::kCrossed, ModelId::kProposed}) {
    if (ModelName(m) == name) return m;
  }
  return std::nullopt;
}

DesignParams::DesignParams(double p, double lambda) : p_(p), lambda_(lambda) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw InvalidParams("p = " + Describe(p) + " must lie in (0, 1]");
  }
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw InvalidParams("lambda = " + Describe(lambda) + " must lie in (0, 1]");
  }
}

PopulationTruth ValidateTruth(double pi_a, double pi_b, double pi_ab) {
  RequireUnit(pi_a, "pi_a");
  RequireUnit(pi_b, "pi_b");
  RequireUnit(pi_ab, "pi_ab");
  if (pi_ab > pi_a + kProbabilityTolerance) {
    throw AdmissibilityError("pi_ab = " + Describe(pi_ab) + " exceeds pi_a = " +
                             Describe(pi_a));
  }
  if (pi_ab > pi_b + kProbabilityTolerance) {
    throw AdmissibilityError("pi_ab = " + Describe(pi_ab) + " exceeds pi_b = " +
                             Describe(pi_b));
  }
  const double neither = 1.0 - pi_a - pi_b + pi_ab;
  if (neither < -kProbabilityTolerance) {
    throw AdmissibilityError("negative fourth cell: 1 - pi_a - pi_b + pi_ab = " +
                             Describe(neither));
  }
  std::array<double, 4> cells{pi_ab, SnapUnit(pi_a - pi_ab),
                              SnapUnit(pi_b - pi_ab), SnapUnit(neither)};
  return PopulationTruth(Proportions{pi_a, pi_b, pi_ab}, cells);
}

ResponseProfile ResponseProfile::FromValues(double t11, double t10, double t01,
                                            double t00) {
  const std::array<double, 4> theta{t11, t10, t01, t00};
  static constexpr const char* kNames[] = {"t11", "t10", "t01", "t00"};
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (!(theta[i] >= 0.0 && theta[i] <= 1.0)) {
      throw InvalidParams(std::string(kNames[i]) + " = " + Describe(theta[i]) +
                          " is outside [0, 1]");
    }
    sum += theta[i];
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    throw InvalidParams("response profile sums to " + Describe(sum) +
                        ", expected 1");
  }
  return ResponseProfile(theta);
}

CellCounts::CellCounts(std::int64_t n11, std::int64_t n10, std::int64_t n01,
                       std::int64_t n00)
    : counts_{n11, n10, n01, n00} {
  static constexpr const char* kNames[] = {"n11", "n10", "n01", "n00"};
  for (int i = 0; i < 4; ++i) {
    if (counts_[i] < 0) {
      throw InvalidParams(std::string(kNames[i]) + " must be non-negative");
    }
  }
}

std::array<double, 4> CellCounts::ThetaHat() const {
  const std::int64_t total = n();
  if (total < 1) throw InvalidParams("cell counts are empty (n = 0)");
  const double dn = static_cast<double>(total);
  return {counts_[0] / dn, counts_[1] / dn, counts_[2] / dn, counts_[3] / dn};
}

double MangatAlpha(double p, double pi) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw InvalidParams("p = " + Describe(p) + " must lie in (0, 1]");
  }
  if (!(pi >= 0.0 && pi <= 1.0)) {
    throw InvalidParams("pi = " + Describe(pi) + " must lie in [0, 1]");
  }
  return pi + (1.0 - pi) * (1.0 - p);
}

ResponseProfile ForwardProposed(const DesignParams& params,
                                const PopulationTruth& truth) {
  const double p = params.p();
  const double l = params.lambda();
  const double a1 = p * l;
  const double a2 = p * (1.0 - l);
  const double a3 = (1.0 - p) * l;
  const double a4 = (1.0 - p) * (1.0 - l);
  const double ab = truth.pi_ab();
  const double a = truth.pi_a();
  const double b = truth.pi_b();
  return ResponseProfile({
      a1 * ab + a2 * a + a3 * b + a4,
      -a1 * ab + a1 * a - a3 * b + a3,
      -a1 * ab - a2 * a + a1 * b + a2,
      a1 * ab - a1 * a - a1 * b + a1,
  });
}

ResponseProfile ForwardSimple(const DesignParams& params,
                              const PopulationTruth& truth) {
  const double p = params.p();
  const double t = params.t();
  const double sp = 2.0 * p - 1.0;
  const double st = 2.0 * t - 1.0;
  const double ab = truth.pi_ab();
  const double a = truth.pi_a();
  const double b = truth.pi_b();
  return ResponseProfile({
      sp * st * ab + sp * (1.0 - t) * a + (1.0 - p) * st * b + (1.0 - p) * (1.0 - t),
      -sp * st * ab + sp * t * a - (1.0 - p) * st * b + (1.0 - p) * t,
      -sp * st * ab - sp * (1.0 - t) * a + p * st * b + p * (1.0 - t),
      sp * st * ab - sp * t * a - p * st * b + p * t,
  });
}

ResponseProfile ForwardMangat(ModelId model, const DesignParams& params,
                              const PopulationTruth& truth) {
  switch (model) {
    case ModelId::kMangatSingleA: {
      const double alpha = MangatAlpha(params.p(), truth.pi_a());
      return ResponseProfile({0.0, alpha, 0.0, 1.0 - alpha});
    }
    case ModelId::kMangatSingleB: {
      const double beta = MangatAlpha(params.lambda(), truth.pi_b());
      return ResponseProfile({0.0, 0.0, beta, 1.0 - beta});
    }
    default:
      throw InvalidParams("ForwardMangat needs a single-attribute Mangat model, got " +
                          std::string(ModelName(model)));
  }
}

}  // namespace rrt
