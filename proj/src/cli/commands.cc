#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "cli/output.h"
#include "rrt/analysis.h"
#include "rrt/cli.h"
#include "rrt/core.h"
#include "rrt/errors.h"
#include "rrt/estimators.h"
#include "rrt/montecarlo.h"

namespace rrt::cli {
namespace {

class IoError : public Error {
 public:
  using Error::Error;
};

constexpr char kCountsHeader[] = "n11,n10,n01,n00";

struct Flags {
  std::string model = "proposed";
  double p = 0.6;
  double lambda = 0.7;
  std::optional<double> pi_a;
  std::optional<double> pi_b;
  std::string pi_ab;
  std::int64_t n = 1000;
  std::int64_t reps = 20000;
  std::uint64_t seed = 42;
  std::string baseline = "simple";
  std::string mode = "published";
  std::string grid;
  std::string out;
  std::string format;
  std::string counts;
  std::string counts_file;
  std::string theta;
  int threads = 1;
  std::string sweep = "pi-a";
  double from = 0.1;
  double to = 0.8;
  double step = 0.1;
  std::string target;
};

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> SplitCommas(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    parts.push_back(Trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

double ParseDouble(std::string_view text, std::string_view field) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidParams(std::string(field) + ": cannot parse '" + std::string(text) +
                        "' as a number");
  }
  return v;
}

CellCounts ParseCountsLine(std::string_view line, std::string_view field) {
  const auto parts = SplitCommas(line);
  if (parts.size() != 4) {
    throw InvalidParams(std::string(field) +
                        ": expected four comma-separated counts n11,n10,n01,n00");
  }
  std::array<std::int64_t, 4> v{};
  for (int i = 0; i < 4; ++i) {
    const auto [ptr, ec] =
        std::from_chars(parts[i].data(), parts[i].data() + parts[i].size(), v[i]);
    if (parts[i].empty() || ec != std::errc() ||
        ptr != parts[i].data() + parts[i].size() || v[i] < 0) {
      throw InvalidParams(std::string(field) + ": '" + std::string(parts[i]) +
                          "' is not a non-negative integer");
    }
  }
  return CellCounts(v[0], v[1], v[2], v[3]);
}

CellCounts ReadCountsFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open counts file '" + path + "'");
  std::string header;
  std::string data;
  std::getline(in, header);
  if (Trim(header) != kCountsHeader) {
    throw InvalidParams("counts-file: first line must be '" + std::string(kCountsHeader) +
                        "'");
  }
  while (std::getline(in, data) && Trim(data).empty()) {
  }
  if (Trim(data).empty()) throw InvalidParams("counts-file: missing data line");
  return ParseCountsLine(Trim(data), "counts-file");
}

DesignParams Params(const Flags& f) { return DesignParams(f.p, f.lambda); }

PopulationTruth Truth(const Flags& f) {
  if (!f.pi_a) throw InvalidParams("--pi-a is required");
  if (!f.pi_b) throw InvalidParams("--pi-b is required");
  if (f.pi_ab.empty()) throw InvalidParams("--pi-ab is required");
  return ValidateTruth(*f.pi_a, *f.pi_b, ParseDouble(Trim(f.pi_ab), "pi-ab"));
}

ModelId Model(const Flags& f) {
  const auto m = ParseModel(f.model);
  if (!m) {
    throw InvalidParams("model: unknown '" + f.model +
                        "' (expected proposed, simple, crossed, mangat-a, mangat-b)");
  }
  return *m;
}

Baseline BaselineFlag(const Flags& f) {
  const auto b = ParseBaseline(f.baseline);
  if (!b) throw InvalidParams("baseline: expected simple or crossed");
  return *b;
}

EfficiencyMode ModeFlag(const Flags& f) {
  const auto m = ParseMode(f.mode);
  if (!m) throw InvalidParams("mode: expected published or formula");
  return *m;
}

std::vector<Section> CmdEstimate(const Flags& f) {
  const ModelId model = Model(f);
  const DesignParams params = Params(f);
  const int sources = !f.counts.empty() + !f.counts_file.empty() + !f.theta.empty();
  if (sources != 1) {
    throw InvalidParams("estimate: give exactly one of --counts, --counts-file, --theta");
  }

  Record rec;
  rec.Add("model", std::string(ModelName(model)));

  if (!f.theta.empty()) {
    if (model != ModelId::kCrossed) {
      throw InvalidParams("theta: a ready profile is accepted only for the crossed model");
    }
    const auto parts = SplitCommas(f.theta);
    if (parts.size() != 4) {
      throw InvalidParams("theta: expected four comma-separated proportions");
    }
    const ResponseProfile profile = ResponseProfile::FromValues(
        ParseDouble(parts[0], "theta"), ParseDouble(parts[1], "theta"),
        ParseDouble(parts[2], "theta"), ParseDouble(parts[3], "theta"));
    const EstimateTriple e = EstimateCrossed(profile, params);
    rec.Add("n", Value{}).Add("p", f.p, 6).Add("lambda", f.lambda, 6);
    rec.Add("pi_a_hat", e.pi_a).Add("pi_b_hat", e.pi_b).Add("pi_ab_hat", e.pi_ab);
    rec.Add("clamped", e.was_clamped);
    rec.Add("pi_a_clamped", e.clamped.a).Add("pi_b_clamped", e.clamped.b);
    rec.Add("pi_ab_clamped", e.clamped.ab);
    rec.Add("se_a", Value{}).Add("se_b", Value{}).Add("se_ab", Value{});
    return {{"estimate", {rec}}};
  }

  const CellCounts counts = !f.counts.empty() ? ParseCountsLine(f.counts, "counts")
                                              : ReadCountsFile(f.counts_file);
  if (counts.n() < 1) throw InvalidParams("counts: total n must be at least 1");
  const std::int64_t n = counts.n();

  if (model == ModelId::kMangatSingleA || model == ModelId::kMangatSingleB) {
    const bool is_a = model == ModelId::kMangatSingleA;
    const double p = is_a ? params.p() : params.lambda();
    const std::int64_t yes = is_a ? counts.n11() + counts.n10() : counts.n11() + counts.n01();
    const double pi_hat = EstimateMangat(yes, n, p);
    const double clamped = std::clamp(pi_hat, 0.0, 1.0);
    const double alpha_hat = static_cast<double>(yes) / static_cast<double>(n);
    const double var = VarMangat(p, alpha_hat, MangatInput::kObservedYesRate, n,
                                 DenominatorConvention::kNMinusOne);
    rec.Add("n", n).Add("p", p, 6).Add("yes_count", yes);
    rec.Add("pi_hat", pi_hat).Add("clamped", clamped != pi_hat);
    rec.Add("pi_clamped", clamped).Add("se", std::sqrt(var));
    return {{"estimate", {rec}}};
  }

  const EstimateTriple e = Estimate(model, counts, params);
  const PopulationTruth at = ValidateTruth(e.clamped);
  VarianceTriple v;
  switch (model) {
    case ModelId::kProposed:
      v = VarProposed(params, at, n);
      break;
    case ModelId::kSimple:
      v = VarSimple(params, at, n);
      break;
    default:
      v = VarCrossed(params, at, n);
      break;
  }
  rec.Add("n", n).Add("p", f.p, 6).Add("lambda", f.lambda, 6);
  rec.Add("pi_a_hat", e.pi_a).Add("pi_b_hat", e.pi_b).Add("pi_ab_hat", e.pi_ab);
  rec.Add("clamped", e.was_clamped);
  rec.Add("pi_a_clamped", e.clamped.a).Add("pi_b_clamped", e.clamped.b);
  rec.Add("pi_ab_clamped", e.clamped.ab);
  rec.Add("se_a", std::sqrt(v.var_a)).Add("se_b", std::sqrt(v.var_b));
  rec.Add("se_ab", std::sqrt(v.var_ab));
  return {{"estimate", {rec}}};
}

std::vector<Section> CmdForward(const Flags& f) {
  const ModelId model = Model(f);
  const DesignParams params = Params(f);
  const PopulationTruth truth = Truth(f);
  std::optional<ResponseProfile> profile;
  switch (model) {
    case ModelId::kProposed:
      profile = ForwardProposed(params, truth);
      break;
    case ModelId::kSimple:
      profile = ForwardSimple(params, truth);
      break;
    case ModelId::kMangatSingleA:
    case ModelId::kMangatSingleB:
      profile = ForwardMangat(model, params, truth);
      break;
    case ModelId::kCrossed:
      throw UnsimulableModel(
          "crossed model has no forward map: respondent-level mechanism not specified");
  }
  Record rec;
  rec.Add("model", std::string(ModelName(model))).Add("p", f.p, 6).Add("lambda", f.lambda, 6);
  rec.Add("pi_a", truth.pi_a(), 6).Add("pi_b", truth.pi_b(), 6).Add("pi_ab", truth.pi_ab(), 6);
  rec.Add("t11", profile->t11()).Add("t10", profile->t10());
  rec.Add("t01", profile->t01()).Add("t00", profile->t00());
  return {{"forward", {rec}}};
}

std::vector<Section> CmdSimulate(const Flags& f) {
  const ModelId model = Model(f);
  SimulationConfig config{model, Params(f), Truth(f), f.n, f.reps, f.seed};
  const SimulationSummary s = RunExperiment(config, f.threads);

  Record head;
  head.Add("model", std::string(ModelName(model))).Add("p", f.p, 6).Add("lambda", f.lambda, 6);
  head.Add("pi_a", config.truth.pi_a(), 6).Add("pi_b", config.truth.pi_b(), 6);
  head.Add("pi_ab", config.truth.pi_ab(), 6);
  head.Add("n", s.n).Add("replications", s.replications);
  head.Add("seed", std::to_string(s.seed));

  Section components{"component", {}};
  for (const ComponentSummary& c : s.components) {
    Record r;
    r.Add("name", std::string(c.name)).Add("truth", c.truth).Add("mean", c.mean);
    r.Add("bias_z", c.bias_in_standard_errors(), 4);
    r.Add("empirical_variance", c.empirical_variance, 12);
    r.Add("theoretical_variance", c.theoretical_variance, 12);
    r.Add("variance_ratio", c.variance_ratio(), 6);
    r.Add("standard_error_of_mean", c.standard_error_of_mean, 12);
    r.Add("theoretical_standard_error", c.theoretical_standard_error, 12);
    components.records.push_back(std::move(r));
  }

  Section theta{"theta", {}};
  static constexpr const char* kCells[] = {"t11", "t10", "t01", "t00"};
  for (int k = 0; k < 4; ++k) {
    Record r;
    r.Add("cell", kCells[k]).Add("theoretical", s.theoretical_theta[k]);
    r.Add("empirical", s.empirical_theta[k]);
    r.Add("standard_error", s.theta_standard_error[k], 12);
    theta.records.push_back(std::move(r));
  }
  return {{"simulation", {head}}, components, theta};
}

std::vector<Section> CmdThresholds(const Flags& f) {
  const DesignParams params = Params(f);
  const PopulationTruth truth = Truth(f);
  const ThresholdReport t = Thresholds(params, truth);
  Record rec;
  rec.Add("p", f.p, 6).Add("lambda", f.lambda, 6);
  rec.Add("pi_a", truth.pi_a(), 6).Add("pi_b", truth.pi_b(), 6).Add("pi_ab", truth.pi_ab(), 6);
  rec.Add("threshold_a", t.threshold_a).Add("satisfied_a", t.satisfied[0]);
  rec.Add("boundary_a", t.on_boundary[0]);
  rec.Add("threshold_b", t.threshold_b).Add("satisfied_b", t.satisfied[1]);
  rec.Add("boundary_b", t.on_boundary[1]);
  rec.Add("threshold_ab", t.threshold_ab ? Value{Fixed{*t.threshold_ab, 10}} : Value{});
  rec.Add("satisfied_ab", t.satisfied[2]).Add("boundary_ab", t.on_boundary[2]);
  return {{"thresholds", {rec}}};
}

std::vector<Section> CmdCurves(const Flags& f) {
  const DesignParams params = Params(f);
  SweepSpec sweep;
  int default_target = 0;
  if (f.sweep == "pi-a") {
    sweep.axis = SweepAxis::kPiA;
  } else if (f.sweep == "pi-b") {
    sweep.axis = SweepAxis::kPiB;
    default_target = 1;
  } else if (f.sweep == "pi-ab") {
    sweep.axis = SweepAxis::kPiAB;
    default_target = 2;
  } else {
    throw InvalidParams("sweep: expected pi-a, pi-b or pi-ab");
  }
  if (f.target.empty()) {
    sweep.target = default_target;
  } else if (f.target == "a") {
    sweep.target = 0;
  } else if (f.target == "b") {
    sweep.target = 1;
  } else if (f.target == "ab") {
    sweep.target = 2;
  } else {
    throw InvalidParams("target: expected a, b or ab");
  }
  sweep.from = f.from;
  sweep.to = f.to;
  sweep.step = f.step;
  sweep.n = f.n;
  sweep.fixed = Proportions{f.pi_a.value_or(0.1), f.pi_b.value_or(0.1),
                            f.pi_ab.empty() ? 0.05 : ParseDouble(Trim(f.pi_ab), "pi-ab")};

  Section series{"curve", {}};
  for (const VarianceCurveRow& row : VarianceCurves(params, sweep)) {
    Record r;
    r.Add("x", row.x, 6).Add("v_sm", row.v_simple, 12).Add("v_cm", row.v_crossed, 12);
    r.Add("v_ea", row.v_proposed, 12);
    series.records.push_back(std::move(r));
  }
  return {series};
}

std::vector<double> TableLevels(const Flags& f) {
  if (f.pi_ab.empty()) return {0.05, 0.1, 0.2};
  std::vector<double> levels;
  for (std::string_view part : SplitCommas(f.pi_ab)) {
    levels.push_back(ParseDouble(part, "pi-ab"));
  }
  return levels;
}

void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << content;
  os.flush();
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<Section> CmdTables(const Flags& f) {
  const DesignParams params = Params(f);
  const Baseline baseline = BaselineFlag(f);
  const EfficiencyMode mode = ModeFlag(f);
  GridRule rule = DefaultGridRule(mode);
  if (!f.grid.empty()) {
    const auto g = ParseGridRule(f.grid);
    if (!g) throw InvalidParams("grid: expected published or admissible");
    rule = *g;
  }
  const std::vector<double> levels = TableLevels(f);
  const int decimals = TableDecimals(baseline);

  const std::filesystem::path dir = f.out.empty() ? "." : f.out;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");

  Section written{"table", {}};
  for (double level : levels) {
    const std::vector<EfficiencyRecord> rows =
        TableGrid(params, std::span<const double>(&level, 1), mode, baseline, rule,
                  f.threads);
    Section table{"", {}};
    for (const EfficiencyRecord& rec : rows) {
      Record r;
      r.Add("pi_a", rec.truth.a, 1).Add("pi_b", rec.truth.b, 1);
      r.Add("re_a", RoundHalfUp(rec.re_a, decimals), decimals);
      r.Add("re_b", RoundHalfUp(rec.re_b, decimals), decimals);
      r.Add("re_ab", RoundHalfUp(rec.re_ab, decimals), decimals);
      table.records.push_back(std::move(r));
    }
    std::ostringstream body;
    Render({table}, Format::kCsv, body);
    const std::string name = "re_" + std::string(BaselineName(baseline)) + "_" +
                             std::string(ModeName(mode)) + "_pab" +
                             FormatFixed(level, 2) + ".csv";
    WriteFile(dir / name, body.str());

    Record w;
    w.Add("pi_ab", level, 2).Add("rows", static_cast<std::int64_t>(rows.size()));
    w.Add("path", (dir / name).string());
    written.records.push_back(std::move(w));
  }
  return {written};
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Randomized response estimation for two related sensitive attributes",
               "rrt"};
  app.set_config("--config", "", "Read flags from a TOML/INI file; flags given on the "
                 "command line win");
  app.require_subcommand(1, 1);

  app.add_option("--model", f.model, "proposed | simple | crossed | mangat-a | mangat-b");
  app.add_option("--p", f.p, "Deck I probability P");
  app.add_option("--lambda", f.lambda, "Deck II probability (T for simple/crossed)");
  app.add_option("--pi-a", f.pi_a, "Population proportion with attribute A");
  app.add_option("--pi-b", f.pi_b, "Population proportion with attribute B");
  app.add_option("--pi-ab", f.pi_ab,
                 "Proportion with both attributes (tables: comma-separated levels)");
  app.add_option("--n", f.n, "Sample size");
  app.add_option("--reps", f.reps, "Monte Carlo replications");
  app.add_option("--seed", f.seed, "Random seed");
  app.add_option("--baseline", f.baseline, "simple | crossed");
  app.add_option("--mode", f.mode, "published | formula");
  app.add_option("--grid", f.grid, "published | admissible (default follows --mode)");
  app.add_option("--out", f.out, "Output file (tables: output directory)");
  app.add_option("--format", f.format, "table | csv | records");
  app.add_option("--counts", f.counts, "Inline counts n11,n10,n01,n00");
  app.add_option("--counts-file", f.counts_file, "Counts file with header n11,n10,n01,n00");
  app.add_option("--theta", f.theta, "Crossed-model proportions t11,t10,t01,t00");
  app.add_option("--threads", f.threads, "Worker threads for simulate and tables");
  app.add_option("--sweep", f.sweep, "Swept coordinate: pi-a | pi-b | pi-ab");
  app.add_option("--from", f.from, "Sweep start");
  app.add_option("--to", f.to, "Sweep end (inclusive)");
  app.add_option("--step", f.step, "Sweep step");
  app.add_option("--target", f.target, "Curve estimator: a | b | ab");

  auto* estimate = app.add_subcommand("estimate", "Estimate proportions from cell counts");
  auto* forward = app.add_subcommand("forward", "Response-pair probabilities for a truth");
  auto* simulate = app.add_subcommand("simulate", "Seeded Monte Carlo validation");
  auto* tables = app.add_subcommand("tables", "Relative-efficiency tables");
  auto* thresholds = app.add_subcommand("thresholds", "Efficiency thresholds");
  auto* curves = app.add_subcommand("curves", "Variance curves for plotting");
  for (auto* sub : {estimate, forward, simulate, tables, thresholds, curves}) {
    sub->fallthrough();
  }

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }

  try {
    if (f.threads < 1) throw InvalidParams("threads must be at least 1");
    const bool is_curves = curves->parsed();
    Format format = is_curves ? Format::kCsv : Format::kTable;
    if (!f.format.empty()) {
      const auto parsed = ParseFormat(f.format);
      if (!parsed) throw InvalidParams("format: expected table, csv or records");
      format = *parsed;
    }

    std::vector<Section> sections;
    bool writes_out = true;
    if (estimate->parsed()) {
      sections = CmdEstimate(f);
    } else if (forward->parsed()) {
      sections = CmdForward(f);
    } else if (simulate->parsed()) {
      sections = CmdSimulate(f);
    } else if (tables->parsed()) {
      sections = CmdTables(f);
      writes_out = false;
    } else if (thresholds->parsed()) {
      sections = CmdThresholds(f);
    } else {
      sections = CmdCurves(f);
    }

    if (writes_out && !f.out.empty()) {
      std::ostringstream body;
      Render(sections, format, body);
      WriteFile(f.out, body.str());
    } else {
      Render(sections, format, out);
    }
    return kExitOk;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const DegenerateDesign& e) {
    err << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const UnsimulableModel& e) {
    err << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }
}

}  // namespace rrt::cli
