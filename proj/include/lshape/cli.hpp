#pragma once

// Command-line front end. `run` is the whole program minus process setup so
// tests can drive it with in-memory streams.
//
// Exit codes: 0 success, 1 internal inconsistency or failed check,
// 2 argument / validation / parse error.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "lshape/casestudy.hpp"
#include "lshape/closedform.hpp"
#include "lshape/errors.hpp"
#include "lshape/format.hpp"
#include "lshape/oracle.hpp"
#include "lshape/scenarios.hpp"
#include "lshape/sweep.hpp"

namespace lshape::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable holding the default output format.
inline constexpr const char* kFormatEnv = "LSHAPE_FORMAT";

enum class OutputFormat { Text, Json, Csv };

inline std::optional<OutputFormat> parse_output_format(std::string_view s) {
  if (s == "text") return OutputFormat::Text;
  if (s == "json") return OutputFormat::Json;
  if (s == "csv") return OutputFormat::Csv;
  return std::nullopt;
}

/// Thrown for argument errors detected after CLI11 parsing.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Settings shared by every subcommand once the arguments are parsed.
struct CliConfig {
  OutputFormat format = OutputFormat::Text;
  oracle::OracleTolerances oracle_tolerances;
  oracle::KktTolerances kkt_tolerances;
  double near_optimal_threshold = casestudy::kDefaultNearOptimalThreshold;
  std::string output_path; // empty: standard output
};

// ---------------------------------------------------------------------------
// Optimization results

inline nlohmann::ordered_json result_to_json(const OptimizationResult& res) {
  nlohmann::ordered_json j;
  j["scenario"] = to_string(res.scenario);
  j["input_volume"] = res.input_volume;
  if (res.is_symmetric()) {
    const auto& d = res.sym();
    j["dims"] = {{"L", d.length()}, {"B", d.width()}, {"H", d.height()}, {"r", d.ratio()}};
    j["display"] = {{"L", round_half_up(d.length(), 2)}, {"B", round_half_up(d.width(), 2)},
                    {"H", round_half_up(d.height(), 2)}, {"r", round_half_up(d.ratio(), 2)},
                    {"S", round_half_up(res.envelope, 2)}};
  } else {
    const auto& d = res.asym();
    j["dims"] = {{"L1", d.L1()}, {"L2", d.L2()}, {"B1", d.B1()}, {"B2", d.B2()},
                 {"H", d.H()},   {"r1", d.r1()}, {"r2", d.r2()}};
    j["display"] = {{"L1", round_half_up(d.L1(), 2)}, {"L2", round_half_up(d.L2(), 2)},
                    {"B1", round_half_up(d.B1(), 2)}, {"B2", round_half_up(d.B2(), 2)},
                    {"H", round_half_up(d.H(), 2)},   {"r1", round_half_up(d.r1(), 2)},
                    {"r2", round_half_up(d.r2(), 2)}, {"S", round_half_up(res.envelope, 2)}};
  }
  j["envelope"] = res.envelope;
  j["active_constraints"] = nlohmann::ordered_json::array();
  for (const auto& c : res.active_constraints) {
    j["active_constraints"].push_back(
        {{"variable", c.variable}, {"side", to_string(c.side)}, {"bound", c.bound}});
  }
  j["degenerate"] = res.degenerate;
  return j;
}

inline std::string result_to_text(const OptimizationResult& res) {
  std::string out = fmt::format("scenario: {}\nV = {} m³\n", to_string(res.scenario),
                                fixed(res.input_volume, 2));
  if (res.is_symmetric()) {
    const auto& d = res.sym();
    out += fmt::format("r = {}\nB = {} m, L = {} m, H = {} m\n", fixed(d.ratio(), 2),
                       fixed(d.width(), 2), fixed(d.length(), 2), fixed(d.height(), 2));
  } else {
    const auto& d = res.asym();
    out += fmt::format("r1 = {}, r2 = {}\nL1 = {} m, L2 = {} m, B1 = {} m, B2 = {} m, H = {} m\n",
                       fixed(d.r1(), 2), fixed(d.r2(), 2), fixed(d.L1(), 2), fixed(d.L2(), 2),
                       fixed(d.B1(), 2), fixed(d.B2(), 2), fixed(d.H(), 2));
  }
  out += fmt::format("S = {} m²\n", fixed(res.envelope, 2));
  out += "active constraints: ";
  if (res.active_constraints.empty()) out += "none";
  for (std::size_t i = 0; i < res.active_constraints.size(); ++i) {
    const auto& c = res.active_constraints[i];
    out += fmt::format("{}{} {} bound ({})", i ? ", " : "", c.variable, to_string(c.side),
                       fixed(c.bound, 2));
  }
  out += fmt::format("\ndegenerate: {}\n", res.degenerate ? "yes" : "no");
  return out;
}

inline std::string result_to_csv(const OptimizationResult& res) {
  if (res.is_symmetric()) {
    const auto& d = res.sym();
    return fmt::format("scenario,V,r,L,B,H,S\n{},{},{},{},{},{},{}\n", to_string(res.scenario),
                       res.input_volume, d.ratio(), d.length(), d.width(), d.height(), res.envelope);
  }
  const auto& d = res.asym();
  return fmt::format("scenario,V,r1,r2,L1,L2,B1,B2,H,S\n{},{},{},{},{},{},{},{},{},{}\n",
                     to_string(res.scenario), res.input_volume, d.r1(), d.r2(), d.L1(), d.L2(),
                     d.B1(), d.B2(), d.H(), res.envelope);
}

inline std::string render_result(const OptimizationResult& res, OutputFormat f) {
  switch (f) {
  case OutputFormat::Json: return result_to_json(res).dump(2) + "\n";
  case OutputFormat::Csv: return result_to_csv(res);
  case OutputFormat::Text: return result_to_text(res);
  }
  return {};
}

// ---------------------------------------------------------------------------
// check

struct ScenarioSummary {
  scenarios::Kind kind;
  int trials = 0;
  int agreed = 0;
  double worst_point = 0.0;
  double worst_objective = 0.0;
  int kkt_checked = 0;
  int kkt_passed = 0;
  double worst_stationarity = 0.0;

  bool ok() const { return agreed == trials && kkt_passed == kkt_checked; }
};

/// Scales every length of a result by (1 + eps); the test hook for `check`.
inline OptimizationResult perturbed(const OptimizationResult& res, double eps) {
  OptimizationResult out = res;
  const double f = 1.0 + eps;
  if (res.is_symmetric()) {
    const auto& d = res.sym();
    out.dims = SymDims(d.length() * f, d.width() * f, d.height());
  } else {
    const auto& d = res.asym();
    out.dims = AsymDims(d.L1() * f, d.L2() * f, d.B1() * f, d.B2() * f, d.H());
  }
  out.envelope = out.envelope_from_dims();
  return out;
}

inline ScenarioSummary run_check(scenarios::Kind kind, int trials, std::uint64_t seed,
                                 double perturbation, const CliConfig& cfg) {
  ScenarioSummary sum{kind};
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const auto input =
        t == 0 ? scenarios::worked_example(kind) : scenarios::random_instance(kind, rng);
    OptimizationResult claimed = oracle::closed_form(input);
    if (perturbation != 0.0) claimed = perturbed(claimed, perturbation);
    const auto cmp =
        oracle::compare(claimed, oracle::numerical_optimum(input), cfg.oracle_tolerances);
    ++sum.trials;
    sum.agreed += cmp.agrees ? 1 : 0;
    sum.worst_point = std::max(sum.worst_point, cmp.rel_error_point);
    sum.worst_objective = std::max(sum.worst_objective, cmp.rel_error_objective);

    std::optional<oracle::KktReport> kkt;
    if (const auto* s = std::get_if<oracle::SymRatioIntervalInput>(&input)) {
      kkt = oracle::kkt_check_sym(s->volume, s->bounds, {claimed.sym().width(), claimed.sym().ratio()},
                                  cfg.kkt_tolerances);
    } else if (const auto* b = std::get_if<oracle::AsymRatioBoxInput>(&input)) {
      const auto& d = claimed.asym();
      kkt = oracle::kkt_check_asym(b->volume, b->r1_range, b->r2_range,
                                   {d.L1(), d.L2(), d.r1(), d.r2()}, cfg.kkt_tolerances);
    }
    if (kkt) {
      ++sum.kkt_checked;
      sum.kkt_passed += kkt->passed ? 1 : 0;
      sum.worst_stationarity = std::max(sum.worst_stationarity, kkt->stationarity_residual);
    }
  }
  return sum;
}

inline std::string render_check(const std::vector<ScenarioSummary>& rows, OutputFormat f) {
  if (f == OutputFormat::Json) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      j.push_back({{"scenario", scenarios::to_string(r.kind)},
                   {"trials", r.trials},
                   {"agreed", r.agreed},
                   {"worst_rel_error_point", r.worst_point},
                   {"worst_rel_error_objective", r.worst_objective},
                   {"kkt_checked", r.kkt_checked},
                   {"kkt_passed", r.kkt_passed},
                   {"worst_stationarity", r.worst_stationarity},
                   {"ok", r.ok()}});
    }
    return j.dump(2) + "\n";
  }
  std::string out;
  if (f == OutputFormat::Csv) {
    out = "scenario,trials,agreed,worst_rel_error_point,worst_rel_error_objective,kkt_checked,"
          "kkt_passed,worst_stationarity,ok\n";
    for (const auto& r : rows) {
      out += fmt::format("{},{},{},{},{},{},{},{},{}\n", scenarios::to_string(r.kind), r.trials,
                         r.agreed, r.worst_point, r.worst_objective, r.kkt_checked, r.kkt_passed,
                         r.worst_stationarity, r.ok() ? "true" : "false");
    }
    return out;
  }
  out = fmt::format("{:<13} {:>6} {:>6} {:>12} {:>12} {:>9} {:>12}  {}\n", "scenario", "trials",
                    "agree", "worst_point", "worst_obj", "kkt_pass", "worst_stat", "status");
  for (const auto& r : rows) {
    const std::string kkt = r.kkt_checked ? fmt::format("{}/{}", r.kkt_passed, r.kkt_checked) : "-";
    const std::string stat = r.kkt_checked ? fmt::format("{:.3e}", r.worst_stationarity) : "-";
    out += fmt::format("{:<13} {:>6} {:>6} {:>12.3e} {:>12.3e} {:>9} {:>12}  {}\n",
                       scenarios::to_string(r.kind), r.trials, r.agreed, r.worst_point,
                       r.worst_objective, kkt, stat, r.ok() ? "ok" : "FAIL");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Entry point

namespace detail {

inline sweep::Range to_range(const std::vector<double>& v, const char* flag) {
  if (v.size() != 2) throw UsageError(fmt::format("{} expects two comma-separated values lo,hi", flag));
  return {v[0], v[1]};
}

inline OutputFormat default_format() {
  const char* env = std::getenv(kFormatEnv);
  if (env == nullptr || *env == '\0') return OutputFormat::Text;
  const auto f = parse_output_format(env);
  if (!f) throw UsageError(fmt::format("{}={} is not one of text|json|csv", kFormatEnv, env));
  return *f;
}

} // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Envelope-minimizing geometry for L-shaped buildings", "lshape"};
  app.require_subcommand(1);
  app.fallthrough();

  CliConfig cfg;
  app.add_option("--output", cfg.output_path, "Write the report to this path instead of stdout");
  std::string format_flag;
  auto add_format = [&](CLI::App* sub, const char* choices) {
    sub->add_option("--format", format_flag, fmt::format("Output format ({})", choices))
        ->check(CLI::IsMember(std::vector<std::string>(
            [&] {
              std::vector<std::string> v;
              std::stringstream ss(choices);
              std::string item;
              while (std::getline(ss, item, '|')) v.push_back(item);
              return v;
            }())));
  };

  // optimize
  auto* optimize = app.add_subcommand("optimize", "Closed-form optimum for one scenario");
  optimize->require_subcommand(1);
  double volume = 0.0;
  double ratio = 0.0;
  std::vector<double> ratio_range, ratios, ratio_ranges;
  double height = 0.0;

  auto* opt_sym = optimize->add_subcommand("sym", "Symmetric plan, r = L/B > 1");
  opt_sym->add_option("--volume", volume, "Volume V in m³")->required();
  auto* o_ratio = opt_sym->add_option("--ratio", ratio, "Fixed ratio r = L/B");
  auto* o_range = opt_sym->add_option("--ratio-range", ratio_range, "Interval a,b for r")
                      ->delimiter(',')
                      ->expected(2);
  o_ratio->excludes(o_range);
  add_format(opt_sym, "text|json|csv");

  auto* opt_asym = optimize->add_subcommand("asym", "Asymmetric plan, ri = Bi/Li in (0,1)");
  opt_asym->add_option("--volume", volume, "Volume V in m³")->required();
  auto* o_ratios = opt_asym->add_option("--ratios", ratios, "Fixed ratios r1,r2")->delimiter(',')->expected(2);
  auto* o_ranges = opt_asym->add_option("--ratio-ranges", ratio_ranges, "Intervals a1,b1,a2,b2")
                       ->delimiter(',')
                       ->expected(4);
  auto* o_height = opt_asym->add_option("--height", height, "Fixed height H in m");
  o_ratios->excludes(o_ranges);
  o_height->excludes(o_ranges);
  add_format(opt_asym, "text|json|csv");

  // degenerate
  auto* degenerate = app.add_subcommand("degenerate", "Unconstrained (cuboid) optimum at fixed volume");
  degenerate->add_option("--volume", volume, "Volume V in m³")->required();
  add_format(degenerate, "text|json|csv");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Compare measured buildings with their optima");
  std::string input_path;
  std::string input_format;
  std::string report_format;
  analyze->add_option("--input", input_path, "Building records (JSON or CSV)")->required();
  analyze->add_option("--format", input_format, "Input format (json|csv); default from extension")
      ->check(CLI::IsMember({"json", "csv"}));
  analyze->add_option("--report-format", report_format, "Report format (text|json)")
      ->check(CLI::IsMember({"text", "json"}));
  analyze->add_option("--threshold", cfg.near_optimal_threshold,
                      "NearOptimal when ΔS is below this many m² (default 2.0)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid data behind a figure, with closed-form minima");
  std::string figure;
  std::optional<double> sweep_volume;
  std::vector<double> sweep_ratios, b_range, r_range, l_range, r1_range, r2_range;
  std::optional<int> samples;
  sweep_cmd->add_option("--figure", figure, "fig2|fig3|fig5|fig6")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig5", "fig6"}));
  sweep_cmd->add_option("--volume", sweep_volume, "Override V");
  sweep_cmd->add_option("--ratios", sweep_ratios, "fig2: r samples; fig5: r1,r2")->delimiter(',');
  sweep_cmd->add_option("--b-range", b_range, "fig2/fig3: B lo,hi")->delimiter(',')->expected(2);
  sweep_cmd->add_option("--r-range", r_range, "fig3: a,b")->delimiter(',')->expected(2);
  sweep_cmd->add_option("--l-range", l_range, "fig5: L lo,hi")->delimiter(',')->expected(2);
  sweep_cmd->add_option("--r1-range", r1_range, "fig6: a1,b1")->delimiter(',')->expected(2);
  sweep_cmd->add_option("--r2-range", r2_range, "fig6: a2,b2")->delimiter(',')->expected(2);
  sweep_cmd->add_option("--samples", samples, "Samples per continuous axis");
  add_format(sweep_cmd, "csv|json");

  // check
  auto* check = app.add_subcommand("check", "Randomized closed-form vs numerical verification");
  std::string scenario_name = "all";
  int trials = 100;
  std::optional<std::uint64_t> seed;
  double perturbation = 0.0;
  check->add_option("--scenario", scenario_name,
                    "sym-fixed|sym-interval|asym-fixed|asym-box|asym-height|all");
  check->add_option("--trials", trials, "Trials per scenario (the first uses the worked example)")
      ->check(CLI::PositiveNumber);
  check->add_option("--seed", seed, "RNG seed (required when CI is set)");
  check->add_option("--objective-tol", cfg.oracle_tolerances.objective, "Relative objective tolerance");
  check->add_option("--point-tol", cfg.oracle_tolerances.point, "Relative point tolerance");
  check->add_option("--perturb", perturbation, "Test hook: scale closed-form lengths by 1+eps")
      ->group("");
  add_format(check, "text|json|csv");

  std::vector<const char*> argv{"lshape"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::ostringstream buffer;
  int status = kExitOk;
  try {
    cfg.format = format_flag.empty() ? detail::default_format() : *parse_output_format(format_flag);

    if (optimize->parsed()) {
      if (opt_sym->parsed()) {
        if (!o_ratio->count() && !o_range->count()) {
          throw UsageError("optimize sym needs --ratio r or --ratio-range a,b");
        }
        const auto res = o_ratio->count()
                             ? optimize_sym_fixed_ratio(volume, SymRatio(ratio))
                             : optimize_sym_ratio_interval(volume, SymRatioInterval(ratio_range[0], ratio_range[1]));
        buffer << render_result(res, cfg.format);
      } else {
        if (!o_ratios->count() && !o_ranges->count()) {
          throw UsageError("optimize asym needs --ratios r1,r2 or --ratio-ranges a1,b1,a2,b2");
        }
        OptimizationResult res = [&] {
          if (o_ranges->count()) {
            return optimize_asym_ratio_box(volume, AsymRatioInterval(ratio_ranges[0], ratio_ranges[1]),
                                           AsymRatioInterval(ratio_ranges[2], ratio_ranges[3]));
          }
          const AsymRatios r(ratios[0], ratios[1]);
          return o_height->count() ? optimize_asym_fixed_height(volume, height, r)
                                   : optimize_asym_fixed_ratios(volume, r);
        }();
        buffer << render_result(res, cfg.format);
      }
    } else if (degenerate->parsed()) {
      const auto res = detect_degenerate_cuboid(volume);
      const char* warning =
          "the unconstrained optimum is a cuboid (L = B): the L-form of the building is lost";
      if (cfg.format == OutputFormat::Json) {
        auto j = result_to_json(res);
        j["warning"] = warning;
        buffer << j.dump(2) << "\n";
      } else if (cfg.format == OutputFormat::Csv) {
        buffer << render_result(res, cfg.format);
        err << "warning: " << warning << "\n";
      } else {
        buffer << render_result(res, cfg.format) << "warning: " << warning << "\n";
      }
    } else if (analyze->parsed()) {
      casestudy::InputFormat in_format = casestudy::InputFormat::Json;
      if (input_format.empty()) {
        const auto ext = std::filesystem::path(input_path).extension().string();
        if (ext == ".csv") in_format = casestudy::InputFormat::Csv;
      } else if (input_format == "csv") {
        in_format = casestudy::InputFormat::Csv;
      }
      std::ifstream in(input_path, std::ios::binary);
      if (!in) throw UsageError(fmt::format("cannot read input file '{}'", input_path));
      const auto specs = casestudy::parse_specs(in, in_format);
      const auto reports = casestudy::analyze_all(specs, cfg.near_optimal_threshold);

      OutputFormat rf = report_format.empty() ? detail::default_format()
                                              : *parse_output_format(report_format);
      if (rf == OutputFormat::Json) {
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& r : reports) j.push_back(casestudy::report_to_json(r));
        buffer << j.dump(2) << "\n";
      } else {
        if (rf == OutputFormat::Csv) throw UsageError("analyze reports support text|json");
        for (std::size_t i = 0; i < reports.size(); ++i) {
          if (i) buffer << "\n";
          buffer << casestudy::render_report(reports[i], casestudy::ReportFormat::Text);
        }
      }
    } else if (sweep_cmd->parsed()) {
      sweep::SweepOverrides o;
      o.volume = sweep_volume;
      if (!sweep_ratios.empty()) o.ratios = sweep_ratios;
      if (!b_range.empty()) o.b_range = detail::to_range(b_range, "--b-range");
      if (!r_range.empty()) o.r_range = detail::to_range(r_range, "--r-range");
      if (!l_range.empty()) o.l_range = detail::to_range(l_range, "--l-range");
      if (!r1_range.empty()) o.r1_range = detail::to_range(r1_range, "--r1-range");
      if (!r2_range.empty()) o.r2_range = detail::to_range(r2_range, "--r2-range");
      o.samples = samples;
      const auto grid = sweep::make_sweep(*sweep::parse_figure(figure), o);
      if (format_flag == "json") {
        buffer << sweep::to_json(grid).dump(2) << "\n";
      } else {
        sweep::write_csv(buffer, grid);
      }
    } else if (check->parsed()) {
      if (!seed && std::getenv("CI") != nullptr) {
        throw UsageError("check needs an explicit --seed when CI is set");
      }
      std::vector<scenarios::Kind> kinds;
      if (scenario_name == "all") {
        kinds.assign(scenarios::kAllKinds.begin(), scenarios::kAllKinds.end());
      } else if (auto k = scenarios::parse_kind(scenario_name)) {
        kinds.push_back(*k);
      } else {
        throw UsageError(fmt::format("unknown scenario '{}'", scenario_name));
      }
      std::vector<ScenarioSummary> rows;
      for (auto k : kinds) rows.push_back(run_check(k, trials, seed.value_or(1), perturbation, cfg));
      buffer << render_check(rows, cfg.format);
      const bool all_ok = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.ok(); });
      status = all_ok ? kExitOk : kExitFailure;
    }
  } catch (const DegeneracyError& e) {
    err << "error: " << e.what() << "\n"
        << "hint: run `lshape degenerate --volume V` for the cuboid solution\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitFailure;
  }

  if (cfg.output_path.empty()) {
    out << buffer.str();
  } else {
    std::ofstream file(cfg.output_path, std::ios::binary);
    if (!file) {
      err << "error: cannot write '" << cfg.output_path << "'\n";
      return kExitUsage;
    }
    file << buffer.str();
  }
  return status;
}

} // namespace lshape::cli
