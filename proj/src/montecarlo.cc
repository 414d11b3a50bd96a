#include "rrt/montecarlo.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include "rrt/errors.h"
#include "rrt/estimators.h"
#include "rrt/running_stats.h"

namespace rrt {
namespace {

constexpr std::int64_t kBlockSize = 64;

bool Bernoulli(double q, Engine& rng) { return UniformUnit(rng) < q; }

Cell DrawCell(const std::array<double, 4>& cumulative, Engine& rng) {
  const double u = UniformUnit(rng);
  for (int k = 0; k < 3; ++k) {
    if (u < cumulative[k]) return static_cast<Cell>(k);
  }
  return Cell::kNeither;
}

std::array<double, 4> Cumulative(const std::array<double, 4>& cells) {
  std::array<double, 4> c{};
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) {
    acc += cells[k];
    c[k] = acc;
  }
  return c;
}

struct BlockStats {
  std::array<RunningStats, 3> estimates;
  std::array<RunningStats, 4> theta;
};

// Raw estimates of the active components for one replication.
int EstimateInto(const SimulationConfig& config, const CellCounts& counts,
                 std::array<double, 3>& out) {
  switch (config.model) {
    case ModelId::kProposed:
    case ModelId::kSimple: {
      const EstimateTriple e = Estimate(config.model, counts, config.params);
      out = {e.pi_a, e.pi_b, e.pi_ab};
      return 3;
    }
    case ModelId::kMangatSingleA:
      out[0] = EstimateMangat(counts.n11() + counts.n10(), counts.n(),
                              config.params.p());
      return 1;
    case ModelId::kMangatSingleB:
      out[0] = EstimateMangat(counts.n11() + counts.n01(), counts.n(),
                              config.params.lambda());
      return 1;
    case ModelId::kCrossed:
      break;
  }
  throw UnsimulableModel("crossed model is not simulable");
}

}  // namespace

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t StreamSeed(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64(seed ^ SplitMix64(stream));
}

AnswerPair SimulateRespondent(ModelId model, const DesignParams& params,
                              Cell cell, Engine& rng) {
  const bool in_a = cell == Cell::kBoth || cell == Cell::kOnlyA;
  const bool in_b = cell == Cell::kBoth || cell == Cell::kOnlyB;
  AnswerPair answer;
  switch (model) {
    case ModelId::kProposed:
      answer.yes_a = in_a || Bernoulli(1.0 - params.p(), rng);
      answer.yes_b = in_b || Bernoulli(1.0 - params.lambda(), rng);
      return answer;
    case ModelId::kSimple:
      // The drawn card states membership with probability P; the respondent
      // answers whether the card is true.
      answer.yes_a = Bernoulli(params.p(), rng) == in_a;
      answer.yes_b = Bernoulli(params.t(), rng) == in_b;
      return answer;
    case ModelId::kMangatSingleA:
      answer.yes_a = in_a || Bernoulli(1.0 - params.p(), rng);
      return answer;
    case ModelId::kMangatSingleB:
      answer.yes_b = in_b || Bernoulli(1.0 - params.lambda(), rng);
      return answer;
    case ModelId::kCrossed:
      break;
  }
  throw UnsimulableModel(
      "crossed model is not simulable: respondent-level mechanism not specified");
}

void ValidateConfig(const SimulationConfig& config) {
  if (config.model == ModelId::kCrossed) {
    throw UnsimulableModel(
        "crossed model is not simulable: respondent-level mechanism not specified");
  }
  if (config.n < 1) throw InvalidParams("n must be at least 1");
  if (config.replications < 1) throw InvalidParams("replications must be at least 1");
}

CellCounts RunReplication(const SimulationConfig& config,
                          std::uint64_t replication_index) {
  ValidateConfig(config);
  Engine rng(StreamSeed(config.seed, replication_index));
  const std::array<double, 4> cumulative = Cumulative(config.truth.cells());
  CellCounts counts;
  for (std::int64_t i = 0; i < config.n; ++i) {
    const Cell cell = DrawCell(cumulative, rng);
    const AnswerPair ans = SimulateRespondent(config.model, config.params, cell, rng);
    counts.Increment(AnswerIndex(ans.yes_a, ans.yes_b));
  }
  return counts;
}

SimulationSummary RunExperiment(const SimulationConfig& config, int threads) {
  ValidateConfig(config);

  SimulationSummary summary;
  summary.model = config.model;
  summary.n = config.n;
  summary.replications = config.replications;
  summary.seed = config.seed;

  const PopulationTruth& truth = config.truth;
  std::array<double, 3> truth3{};
  std::array<double, 3> theory{};
  std::vector<std::string_view> names;
  switch (config.model) {
    case ModelId::kProposed:
    case ModelId::kSimple: {
      const VarianceTriple v = config.model == ModelId::kProposed
                                   ? VarProposed(config.params, truth, config.n)
                                   : VarSimple(config.params, truth, config.n);
      const ResponseProfile th = config.model == ModelId::kProposed
                                     ? ForwardProposed(config.params, truth)
                                     : ForwardSimple(config.params, truth);
      truth3 = {truth.pi_a(), truth.pi_b(), truth.pi_ab()};
      theory = {v.var_a, v.var_b, v.var_ab};
      summary.theoretical_theta = th.values();
      names = {"pi_a", "pi_b", "pi_ab"};
      break;
    }
    case ModelId::kMangatSingleA:
    case ModelId::kMangatSingleB: {
      const bool is_a = config.model == ModelId::kMangatSingleA;
      const double p = is_a ? config.params.p() : config.params.lambda();
      const double pi = is_a ? truth.pi_a() : truth.pi_b();
      truth3[0] = pi;
      theory[0] = VarMangat(p, pi, MangatInput::kTruth, config.n,
                            DenominatorConvention::kN);
      summary.theoretical_theta =
          ForwardMangat(config.model, config.params, truth).values();
      names = {is_a ? "pi_a" : "pi_b"};
      break;
    }
    case ModelId::kCrossed:
      break;
  }
  const std::int64_t reps = config.replications;
  const std::int64_t blocks = (reps + kBlockSize - 1) / kBlockSize;
  std::vector<BlockStats> per_block(static_cast<std::size_t>(blocks));
  std::atomic<std::int64_t> next{0};

  auto worker = [&]() {
    std::array<double, 3> est{};
    for (std::int64_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) {
      BlockStats& stats = per_block[static_cast<std::size_t>(b)];
      const std::int64_t end = std::min(reps, (b + 1) * kBlockSize);
      for (std::int64_t r = b * kBlockSize; r < end; ++r) {
        const CellCounts counts = RunReplication(config, static_cast<std::uint64_t>(r));
        const int active = EstimateInto(config, counts, est);
        for (int k = 0; k < active; ++k) stats.estimates[k].Add(est[k]);
        const std::array<double, 4> th = counts.ThetaHat();
        for (int k = 0; k < 4; ++k) stats.theta[k].Add(th[k]);
      }
    }
  };

  const int workers = std::clamp<int>(threads, 1, static_cast<int>(std::min<std::int64_t>(blocks, 256)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  BlockStats total;
  for (const BlockStats& b : per_block) {
    for (int k = 0; k < 3; ++k) total.estimates[k].Merge(b.estimates[k]);
    for (int k = 0; k < 4; ++k) total.theta[k].Merge(b.theta[k]);
  }

  const double r = static_cast<double>(reps);
  for (std::size_t k = 0; k < names.size(); ++k) {
    ComponentSummary c;
    c.name = names[k];
    c.truth = truth3[k];
    c.mean = total.estimates[k].mean();
    c.empirical_variance = total.estimates[k].variance();
    c.standard_error_of_mean = total.estimates[k].standard_error();
    c.theoretical_variance = theory[k];
    c.theoretical_standard_error = std::sqrt(theory[k] / r);
    summary.components.push_back(c);
  }
  for (int k = 0; k < 4; ++k) {
    summary.empirical_theta[k] = total.theta[k].mean();
    summary.theta_standard_error[k] = total.theta[k].standard_error();
  }
  return summary;
}

bool MomentReport::all_within() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const MomentCheck& c) { return c.magnitude_within; });
}

MomentReport ValidateMultinomialMoments(const ResponseProfile& profile,
                                      std::int64_t n, std::int64_t draws,
                                      std::uint64_t seed, double z_limit) {
  if (n < 1) throw InvalidParams("n must be at least 1");
  if (draws < 2) throw InvalidParams("draws must be at least 2");
  const std::array<double, 4>& theta = profile.values();
  const std::array<double, 4> cumulative = Cumulative(theta);

  // Pairs (i, j) with i <= j: 4 variances first, then 6 covariances.
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < 4; ++i) pairs.emplace_back(i, i);
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) pairs.emplace_back(i, j);
  }
  std::vector<RunningStats> products(pairs.size());

  Engine rng(StreamSeed(seed, 0));
  const double dn = static_cast<double>(n);
  for (std::int64_t d = 0; d < draws; ++d) {
    std::array<std::int64_t, 4> counts{0, 0, 0, 0};
    for (std::int64_t i = 0; i < n; ++i) {
      ++counts[static_cast<int>(DrawCell(cumulative, rng))];
    }
    std::array<double, 4> centered{};
    for (int k = 0; k < 4; ++k) centered[k] = counts[k] / dn - theta[k];
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      products[p].Add(dn * centered[pairs[p].first] * centered[pairs[p].second]);
    }
  }

  MomentReport report;
  report.n = n;
  report.draws = draws;
  report.z_limit = z_limit;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    MomentCheck c;
    c.first = i;
    c.second = j;
    c.expected = i == j ? theta[i] * (1.0 - theta[i]) : -theta[i] * theta[j];
    c.empirical = products[p].mean();
    c.standard_error = products[p].standard_error();
    const double gap = std::abs(std::abs(c.empirical) - std::abs(c.expected));
    c.magnitude_within =
        gap <= z_limit * c.standard_error + kProbabilityTolerance;
    c.positive_sign_holds = i == j ? c.empirical >= 0.0 : c.empirical > 0.0;
    report.checks.push_back(c);
  }
  return report;
}

}  // namespace rrt
