#ifndef RRT_CORE_H_
#define RRT_CORE_H_

// Domain types shared by every design: device probabilities, the population
// truth with its four joint cells, response profiles, and observed counts.
// Forward maps send a population truth to the probabilities of the four
// (answer A, answer B) pairs.

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace rrt {

// Absolute tolerance for probability identities (sums, admissibility bounds).
inline constexpr double kProbabilityTolerance = 1e-12;

enum class ModelId {
  kMangatSingleA,
  kMangatSingleB,
  kSimple,
  kCrossed,
  kProposed,
};

std::string_view ModelName(ModelId model);
std::optional<ModelId> ParseModel(std::string_view name);

// Respondent membership cell. The numeric value indexes PopulationTruth::cells().
enum class Cell : int {
  kBoth = 0,     // A and B
  kOnlyA = 1,    // A, not B
  kOnlyB = 2,    // B, not A
  kNeither = 3,  // neither
};

// Answer-pair slot in a ResponseProfile or CellCounts: 11, 10, 01, 00.
inline constexpr int AnswerIndex(bool yes_a, bool yes_b) {
  return (yes_a ? 0 : 2) + (yes_b ? 0 : 1);
}

// Deck probabilities. `p` drives deck I (attribute A); `lambda` drives deck II
// (attribute B) and is the T of the simple and crossed designs.
class DesignParams {
 public:
  // Throws InvalidParams unless both lie in (0, 1].
  DesignParams(double p, double lambda);

  double p() const { return p_; }
  double lambda() const { return lambda_; }
  double t() const { return lambda_; }

 private:
  double p_;
  double lambda_;
};

// Plain (pi_A, pi_B, pi_AB) coordinates with no admissibility guarantee.
struct Proportions {
  double a = 0.0;
  double b = 0.0;
  double ab = 0.0;
};

class PopulationTruth {
 public:
  double pi_a() const { return coords_.a; }
  double pi_b() const { return coords_.b; }
  double pi_ab() const { return coords_.ab; }
  const Proportions& proportions() const { return coords_; }

  // Joint cells indexed by Cell: (pi_AB, pi_A - pi_AB, pi_B - pi_AB,
  // 1 - pi_A - pi_B + pi_AB). Each in [0, 1], summing to 1.
  const std::array<double, 4>& cells() const { return cells_; }
  double cell(Cell c) const { return cells_[static_cast<int>(c)]; }

 private:
  friend PopulationTruth ValidateTruth(double pi_a, double pi_b, double pi_ab);
  PopulationTruth(Proportions coords, std::array<double, 4> cells)
      : coords_(coords), cells_(cells) {}

  Proportions coords_;
  std::array<double, 4> cells_;
};

// Throws AdmissibilityError naming the violated constraint.
PopulationTruth ValidateTruth(double pi_a, double pi_b, double pi_ab);
inline PopulationTruth ValidateTruth(const Proportions& p) {
  return ValidateTruth(p.a, p.b, p.ab);
}

// Probabilities of the answer pairs (yes,yes), (yes,no), (no,yes), (no,no).
class ResponseProfile {
 public:
  // Throws InvalidParams unless every entry is in [0, 1] and they sum to 1.
  static ResponseProfile FromValues(double t11, double t10, double t01,
                                    double t00);

  double t11() const { return theta_[0]; }
  double t10() const { return theta_[1]; }
  double t01() const { return theta_[2]; }
  double t00() const { return theta_[3]; }
  const std::array<double, 4>& values() const { return theta_; }

 private:
  friend ResponseProfile ForwardProposed(const DesignParams&,
                                         const PopulationTruth&);
  friend ResponseProfile ForwardSimple(const DesignParams&,
                                       const PopulationTruth&);
  friend ResponseProfile ForwardMangat(ModelId, const DesignParams&,
                                       const PopulationTruth&);
  explicit ResponseProfile(std::array<double, 4> theta) : theta_(theta) {}

  std::array<double, 4> theta_;
};

class CellCounts {
 public:
  CellCounts() = default;
  // Throws InvalidParams on negative entries.
  CellCounts(std::int64_t n11, std::int64_t n10, std::int64_t n01,
             std::int64_t n00);

  std::int64_t n11() const { return counts_[0]; }
  std::int64_t n10() const { return counts_[1]; }
  std::int64_t n01() const { return counts_[2]; }
  std::int64_t n00() const { return counts_[3]; }
  std::int64_t n() const { return counts_[0] + counts_[1] + counts_[2] + counts_[3]; }
  const std::array<std::int64_t, 4>& values() const { return counts_; }

  void Increment(int answer_index) { ++counts_[answer_index]; }

  // Observed proportions n_ij / n. Throws InvalidParams when n == 0.
  std::array<double, 4> ThetaHat() const;

 private:
  std::array<std::int64_t, 4> counts_{0, 0, 0, 0};
};

// Mangat single-attribute yes probability: pi + (1 - pi)(1 - P).
double MangatAlpha(double p, double pi);

// Proposed design: members answer yes directly, non-members consult deck I
// (resp. II) and answer yes to the negated statement.
ResponseProfile ForwardProposed(const DesignParams& params,
                                const PopulationTruth& truth);

// Simple design: two independent Warner decks. Answer A is yes with
// probability P for members of A and 1 - P otherwise; answer B likewise with T.
ResponseProfile ForwardSimple(const DesignParams& params,
                              const PopulationTruth& truth);

// Single-attribute Mangat profile as tallied by the simulator: the unused
// answer is always "no". MangatSingleA uses p, MangatSingleB uses lambda.
// Throws InvalidParams for any other model.
ResponseProfile ForwardMangat(ModelId model, const DesignParams& params,
                              const PopulationTruth& truth);

}  // namespace rrt

#endif  // RRT_CORE_H_
