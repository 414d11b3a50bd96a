#ifndef RRT_MONTECARLO_H_
#define RRT_MONTECARLO_H_

// Seeded respondent-level simulation of the Mangat, simple and proposed
// designs.
//
// Random streams: replication r of an experiment with seed s draws from
// std::mt19937_64 seeded with StreamSeed(s, r), where
//   StreamSeed(s, r) = SplitMix64(s ^ SplitMix64(r)).
// A replication's counts therefore depend only on (s, r), never on which
// worker ran it or in what order.

#include <array>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "rrt/analysis.h"
#include "rrt/core.h"

namespace rrt {

using Engine = std::mt19937_64;

// One step of the SplitMix64 output function.
std::uint64_t SplitMix64(std::uint64_t x);
std::uint64_t StreamSeed(std::uint64_t seed, std::uint64_t stream);

// Uniform double in [0, 1) built from the top 53 bits of one engine output.
inline double UniformUnit(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct AnswerPair {
  bool yes_a = false;
  bool yes_b = false;
};

// Throws UnsimulableModel for the crossed model. Single-attribute Mangat
// models always answer "no" to the attribute they do not ask about.
AnswerPair SimulateRespondent(ModelId model, const DesignParams& params,
                              Cell cell, Engine& rng);

struct SimulationConfig {
  ModelId model;
  DesignParams params;
  PopulationTruth truth;
  std::int64_t n = 1;             // respondents per replication
  std::int64_t replications = 1;  // R
  std::uint64_t seed = 0;
};

// Throws UnsimulableModel for the crossed model and InvalidParams when
// n < 1 or R < 1.
void ValidateConfig(const SimulationConfig& config);

// Draws n respondents with replacement from the truth's joint cells and
// tallies their answer pairs.
CellCounts RunReplication(const SimulationConfig& config,
                          std::uint64_t replication_index);

struct ComponentSummary {
  std::string_view name;  // "pi_a", "pi_b" or "pi_ab"
  double truth = 0.0;
  double mean = 0.0;
  double empirical_variance = 0.0;  // R - 1 denominator
  double standard_error_of_mean = 0.0;
  double theoretical_variance = 0.0;
  // sqrt(theoretical_variance / R)
  double theoretical_standard_error = 0.0;

  double bias_in_standard_errors() const {
    return (mean - truth) / theoretical_standard_error;
  }
  double variance_ratio() const {
    return empirical_variance / theoretical_variance;
  }
};

struct SimulationSummary {
  ModelId model = ModelId::kProposed;
  std::int64_t n = 0;
  std::int64_t replications = 0;
  std::uint64_t seed = 0;
  // pi_a, pi_b, pi_ab for the two-attribute designs; the single estimated
  // proportion for a Mangat design.
  std::vector<ComponentSummary> components;
  std::array<double, 4> empirical_theta{};
  std::array<double, 4> theta_standard_error{};
  std::array<double, 4> theoretical_theta{};
};

// Runs R replications and aggregates raw estimates. Replications are grouped
// in fixed blocks whose statistics are merged in block order, so the summary
// is bit-identical for every `threads` value. Throws DegenerateDesign when
// the matching estimator is undefined at the configured parameters.
SimulationSummary RunExperiment(const SimulationConfig& config, int threads = 1);

// Checks the per-respondent moments of the multinomial answer indicators:
// V(x_ij) = theta_ij (1 - theta_ij) and |C(x_ij, x_kl)| = theta_ij theta_kl.
// The indicator covariance is negative; `positive_sign_holds` records whether
// the empirical covariance came out with the positive sign instead.
struct MomentCheck {
  int first = 0;   // answer index (0 = 11, 1 = 10, 2 = 01, 3 = 00)
  int second = 0;  // equal to `first` for a variance
  double expected = 0.0;  // signed multinomial moment
  double empirical = 0.0;
  double standard_error = 0.0;
  bool magnitude_within = false;
  bool positive_sign_holds = false;

  bool is_variance() const { return first == second; }
};

struct MomentReport {
  std::int64_t n = 0;
  std::int64_t draws = 0;
  double z_limit = 4.0;
  std::vector<MomentCheck> checks;  // 4 variances, then 6 covariances

  bool all_within() const;
};

// Samples `draws` multinomial vectors of size n at `profile` and compares n
// times the empirical (co)variances of the cell proportions with the
// per-respondent moments, within z_limit standard errors.
MomentReport ValidateMultinomialMoments(const ResponseProfile& profile,
                                      std::int64_t n, std::int64_t draws,
                                      std::uint64_t seed, double z_limit = 4.0);

}  // namespace rrt

#endif  // RRT_MONTECARLO_H_
