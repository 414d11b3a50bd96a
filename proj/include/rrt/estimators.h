#ifndef RRT_ESTIMATORS_H_
#define RRT_ESTIMATORS_H_

// Moment estimators of (pi_A, pi_B, pi_AB) for each design. All estimators
// are affine in the observed proportions theta_hat_ij = n_ij / n and are
// reported raw; a clamped companion projects the triple onto the admissible
// region.

#include <array>
#include <cstdint>

#include "rrt/core.h"

namespace rrt {

struct EstimateTriple {
  double pi_a = 0.0;
  double pi_b = 0.0;
  double pi_ab = 0.0;
  ModelId model = ModelId::kProposed;
  // Raw triple projected onto the admissible region; `was_clamped` is true
  // when the projection moved at least one coordinate.
  Proportions clamped;
  bool was_clamped = false;

  Proportions raw() const { return {pi_a, pi_b, pi_ab}; }
};

// Clips pi_A and pi_B to [0, 1], then pi_AB to
// [max(0, pi_A + pi_B - 1), min(pi_A, pi_B)].
Proportions ClampToAdmissible(const Proportions& raw);

// (alpha_hat - 1 + P) / P with alpha_hat = yes_count / n.
double EstimateMangat(std::int64_t yes_count, std::int64_t n, double p);

EstimateTriple EstimateProposed(const CellCounts& counts,
                                const DesignParams& params);
EstimateTriple EstimateProposed(const ResponseProfile& theta_hat,
                                const DesignParams& params);

// Throws DegenerateDesign when P = 0.5 or T = 0.5.
EstimateTriple EstimateSimple(const CellCounts& counts,
                              const DesignParams& params);
EstimateTriple EstimateSimple(const ResponseProfile& theta_hat,
                              const DesignParams& params);

// Crossed-model proportions are supplied directly or as counts. Throws
// DegenerateDesign when P + T = 1.
EstimateTriple EstimateCrossed(const CellCounts& counts,
                               const DesignParams& params);
EstimateTriple EstimateCrossed(const ResponseProfile& theta_hat,
                               const DesignParams& params);

// Dispatches on `model` for the three two-attribute designs. Throws
// InvalidParams for the single-attribute Mangat models.
EstimateTriple Estimate(ModelId model, const CellCounts& counts,
                        const DesignParams& params);

}  // namespace rrt

#endif  // RRT_ESTIMATORS_H_
