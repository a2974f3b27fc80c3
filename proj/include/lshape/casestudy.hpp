#pragma once

// Measured building records: ingestion, derived parameters, and
// original-versus-optimal comparison reports.

#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "lshape/closedform.hpp"
#include "lshape/errors.hpp"
#include "lshape/format.hpp"
#include "lshape/geometry.hpp"

namespace lshape::casestudy {

/// Exterior plan dimensions in meters, as drawn.
struct BuildingSpec {
  std::string name;
  double L1 = 0, L2 = 0, B1 = 0, B2 = 0, H = 0;
  std::optional<std::string> source;

  AsymDims dims() const { return AsymDims(L1, L2, B1, B2, H); }

  friend bool operator==(const BuildingSpec&, const BuildingSpec&) = default;
};

enum class InputFormat { Json, Csv };

inline constexpr std::string_view kCsvHeader = "name,L1,L2,B1,B2,H,source";

namespace detail {

inline void validate_batch(const std::vector<BuildingSpec>& specs) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    const std::string locus = fmt::format("record {}", i + 1);
    if (s.name.empty()) throw ValidationError(locus + ": name must be non-empty");
    try {
      (void)s.dims();
    } catch (const DomainError& e) {
      throw ValidationError(fmt::format("{} ('{}'): {}", locus, s.name, e.what()));
    }
    if (!seen.insert(s.name).second) {
      throw ValidationError(fmt::format("{}: duplicate name '{}'", locus, s.name));
    }
  }
}

inline std::vector<BuildingSpec> parse_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fmt::format("JSON syntax error at byte {}: {}", e.byte, e.what()));
  }
  if (!doc.is_array()) throw ParseError("JSON input must be a top-level array of records");

  static const std::set<std::string> known{"name", "L1", "L2", "B1", "B2", "H", "source"};
  std::vector<BuildingSpec> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& rec = doc[i];
    const std::string locus = fmt::format("record {}", i + 1);
    if (!rec.is_object()) throw ParseError(locus + ": expected an object");
    for (const auto& [key, _] : rec.items()) {
      if (!known.contains(key)) throw ValidationError(fmt::format("{}: unknown field '{}'", locus, key));
    }
    BuildingSpec s;
    if (!rec.contains("name") || !rec["name"].is_string()) {
      throw ValidationError(locus + ": field 'name' must be a string");
    }
    s.name = rec["name"].get<std::string>();
    auto number = [&](const char* key) {
      if (!rec.contains(key) || !rec[key].is_number()) {
        throw ValidationError(fmt::format("{} ('{}'): field '{}' must be a number", locus, s.name, key));
      }
      return rec[key].get<double>();
    };
    s.L1 = number("L1");
    s.L2 = number("L2");
    s.B1 = number("B1");
    s.B2 = number("B2");
    s.H = number("H");
    if (rec.contains("source") && !rec["source"].is_null()) {
      if (!rec["source"].is_string()) {
        throw ValidationError(fmt::format("{} ('{}'): field 'source' must be a string", locus, s.name));
      }
      s.source = rec["source"].get<std::string>();
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// Splits one CSV line; double quotes enclose fields, "" escapes a quote.
inline std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw ParseError(fmt::format("line {}: unterminated quoted field", line_no));
  return fields;
}

inline double parse_number(const std::string& field, std::string_view name, std::size_t line_no) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw ParseError(fmt::format("line {}: field '{}' is not a dot-decimal number: '{}'", line_no,
                                 name, field));
  }
  return v;
}

inline std::vector<BuildingSpec> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line()) throw ParseError(fmt::format("line 1: missing CSV header '{}'", kCsvHeader));
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  if (line != kCsvHeader) {
    throw ParseError(fmt::format("line 1: CSV header must be exactly '{}' (got '{}')", kCsvHeader, line));
  }

  static constexpr std::string_view names[] = {"name", "L1", "L2", "B1", "B2", "H", "source"};
  std::vector<BuildingSpec> out;
  while (next_line()) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line, line_no);
    if (f.size() != 7) {
      throw ParseError(fmt::format("line {}: expected 7 fields, got {}", line_no, f.size()));
    }
    BuildingSpec s;
    s.name = f[0];
    s.L1 = parse_number(f[1], names[1], line_no);
    s.L2 = parse_number(f[2], names[2], line_no);
    s.B1 = parse_number(f[3], names[3], line_no);
    s.B2 = parse_number(f[4], names[4], line_no);
    s.H = parse_number(f[5], names[5], line_no);
    if (!f[6].empty()) s.source = f[6];
    out.push_back(std::move(s));
  }
  return out;
}

} // namespace detail

/// Parses and validates a batch of building records; ordering is preserved.
inline std::vector<BuildingSpec> parse_specs(const std::string& text, InputFormat format) {
  auto specs = format == InputFormat::Json ? detail::parse_json(text) : detail::parse_csv(text);
  detail::validate_batch(specs);
  return specs;
}

inline std::vector<BuildingSpec> parse_specs(std::istream& in, InputFormat format) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_specs(text, format);
}

struct DerivedParams {
  double r1;
  double r2;
  double volume;
  double envelope;
  double compactness_vs_fixed_ratios; // S / S_min at the same V, r1, r2

  AsymRatios ratios() const { return AsymRatios(r1, r2); }
};

inline DerivedParams derive_parameters(const BuildingSpec& spec) {
  const AsymDims d = spec.dims();
  const double V = asym_volume(d);
  const double S = asym_envelope(d);
  return {d.r1(), d.r2(), V, S, S / asym_min_envelope(V, fill_factor(d.ratios()))};
}

enum class Verdict { Improvable, NearOptimal };

inline std::string_view to_string(Verdict v) {
  return v == Verdict::Improvable ? "Improvable" : "NearOptimal";
}

inline constexpr double kDefaultNearOptimalThreshold = 2.0;

struct ComparisonReport {
  BuildingSpec spec;
  DerivedParams derived;
  OptimizationResult optimal_fixed_ratios;
  OptimizationResult optimal_fixed_height;
  double delta_S_fixed_ratios;
  double delta_S_fixed_height;
  Verdict verdict_fixed_ratios;
  Verdict verdict_fixed_height;
  double near_optimal_threshold;
};

inline ComparisonReport analyze(const BuildingSpec& spec,
                                double near_optimal_threshold = kDefaultNearOptimalThreshold) {
  if (!std::isfinite(near_optimal_threshold) || near_optimal_threshold < 0.0) {
    throw DomainError("near-optimal threshold must be a non-negative number of m²");
  }
  const DerivedParams derived = derive_parameters(spec);
  const AsymRatios r = derived.ratios();
  auto fixed_ratios = optimize_asym_fixed_ratios(derived.volume, r);
  auto fixed_height = optimize_asym_fixed_height(derived.volume, spec.H, r);
  const double d_ratios = derived.envelope - fixed_ratios.envelope;
  const double d_height = derived.envelope - fixed_height.envelope;
  if (d_ratios < -1e-9 || d_height < -1e-9) {
    throw InconsistencyError(fmt::format("'{}': optimum exceeds the original envelope", spec.name));
  }
  auto verdict = [&](double d) {
    return d < near_optimal_threshold ? Verdict::NearOptimal : Verdict::Improvable;
  };
  return {spec,     derived,          std::move(fixed_ratios), std::move(fixed_height),
          d_ratios, d_height,         verdict(d_ratios),       verdict(d_height),
          near_optimal_threshold};
}

inline std::vector<ComparisonReport> analyze_all(const std::vector<BuildingSpec>& specs,
                                                 double near_optimal_threshold = kDefaultNearOptimalThreshold) {
  std::vector<ComparisonReport> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(analyze(s, near_optimal_threshold));
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

enum class ReportFormat { Text, Json };

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson optimum_json(const OptimizationResult& res, double delta, Verdict verdict) {
  const AsymDims& d = res.asym();
  ojson exact = {{"L1", d.L1()}, {"L2", d.L2()}, {"B1", d.B1()}, {"B2", d.B2()},
                 {"H", d.H()},   {"S", res.envelope}, {"delta_S", delta}};
  ojson display = {{"L1", round_half_up(d.L1(), 2)}, {"L2", round_half_up(d.L2(), 2)},
                   {"B1", round_half_up(d.B1(), 2)}, {"B2", round_half_up(d.B2(), 2)},
                   {"H", round_half_up(d.H(), 2)},   {"S", round_half_up(res.envelope, 1)},
                   {"delta_S", round_half_up(delta, 1)}};
  return {{"scenario", to_string(res.scenario)},
          {"exact", exact},
          {"display", display},
          {"verdict", to_string(verdict)}};
}

inline std::string optimum_line(const OptimizationResult& res) {
  const AsymDims& d = res.asym();
  return fmt::format("L1 = L2 = {} m, B1 = {} m, B2 = {} m, H = {} m, S_min = {} m²",
                     fixed(d.L1(), 2), fixed(d.B1(), 2), fixed(d.B2(), 2), fixed(d.H(), 2),
                     fixed(res.envelope, 1));
}

} // namespace detail

/// Full-precision `exact` values plus a `display` view rounded half-up to the
/// precision used in text output. Field order is fixed.
inline nlohmann::ordered_json report_to_json(const ComparisonReport& r) {
  using detail::ojson;
  const auto& s = r.spec;
  const auto& d = r.derived;
  ojson j;
  j["name"] = s.name;
  j["source"] = s.source ? ojson(*s.source) : ojson(nullptr);
  j["spec"] = {{"L1", s.L1}, {"L2", s.L2}, {"B1", s.B1}, {"B2", s.B2}, {"H", s.H}};
  j["derived"] = {
      {"exact",
       {{"r1", d.r1}, {"r2", d.r2}, {"V", d.volume}, {"S", d.envelope},
        {"compactness", d.compactness_vs_fixed_ratios}}},
      {"display",
       {{"r1", round_half_up(d.r1, 2)},
        {"r2", round_half_up(d.r2, 2)},
        {"V", round_half_up(d.volume, 1)},
        {"S", round_half_up(d.envelope, 1)},
        {"compactness", round_half_up(d.compactness_vs_fixed_ratios, 3)}}}};
  j["fixed_ratios"] =
      detail::optimum_json(r.optimal_fixed_ratios, r.delta_S_fixed_ratios, r.verdict_fixed_ratios);
  j["fixed_height"] =
      detail::optimum_json(r.optimal_fixed_height, r.delta_S_fixed_height, r.verdict_fixed_height);
  j["near_optimal_threshold"] = r.near_optimal_threshold;
  return j;
}

/// Rebuilds a report from the `exact` fields of its JSON form.
inline ComparisonReport report_from_json(const nlohmann::json& j) {
  try {
    BuildingSpec spec;
    spec.name = j.at("name").get<std::string>();
    if (!j.at("source").is_null()) spec.source = j.at("source").get<std::string>();
    const auto& sp = j.at("spec");
    spec.L1 = sp.at("L1").get<double>();
    spec.L2 = sp.at("L2").get<double>();
    spec.B1 = sp.at("B1").get<double>();
    spec.B2 = sp.at("B2").get<double>();
    spec.H = sp.at("H").get<double>();

    const auto& de = j.at("derived").at("exact");
    DerivedParams derived{de.at("r1").get<double>(), de.at("r2").get<double>(),
                          de.at("V").get<double>(), de.at("S").get<double>(),
                          de.at("compactness").get<double>()};

    auto optimum = [&](const char* key, Scenario scenario, double& delta, Verdict& verdict) {
      const auto& o = j.at(key);
      const auto& e = o.at("exact");
      delta = e.at("delta_S").get<double>();
      verdict = o.at("verdict").get<std::string>() == "Improvable" ? Verdict::Improvable
                                                                  : Verdict::NearOptimal;
      AsymDims dims(e.at("L1").get<double>(), e.at("L2").get<double>(), e.at("B1").get<double>(),
                    e.at("B2").get<double>(), e.at("H").get<double>());
      return OptimizationResult{scenario, dims, e.at("S").get<double>(), derived.volume, {}, false};
    };
    double d1 = 0, d2 = 0;
    Verdict v1{}, v2{};
    auto fr = optimum("fixed_ratios", Scenario::AsymFixedRatios, d1, v1);
    auto fh = optimum("fixed_height", Scenario::AsymFixedHeight, d2, v2);
    return {spec, derived, fr, fh, d1, d2, v1, v2, j.at("near_optimal_threshold").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("report JSON does not match the schema: {}", e.what()));
  }
}

inline std::string render_text(const ComparisonReport& r) {
  const auto& s = r.spec;
  const auto& d = r.derived;
  std::string out = s.name + "\n";
  if (s.source) out += fmt::format("  source:        {}\n", *s.source);
  out += fmt::format("  input:         L1 = {} m, L2 = {} m, B1 = {} m, B2 = {} m, H = {} m\n",
                     fixed(s.L1, 2), fixed(s.L2, 2), fixed(s.B1, 2), fixed(s.B2, 2), fixed(s.H, 2));
  out += fmt::format("  derived:       r1 = {}, r2 = {}, V = {} m³, S = {} m², S/S_min = {}\n",
                     fixed(d.r1, 2), fixed(d.r2, 2), fixed(d.volume, 1), fixed(d.envelope, 1),
                     fixed(d.compactness_vs_fixed_ratios, 3));
  out += fmt::format("  fixed ratios:  {}\n", detail::optimum_line(r.optimal_fixed_ratios));
  out += fmt::format("                 ΔS(fixed ratios) = {} m² [{}]\n",
                     fixed(r.delta_S_fixed_ratios, 1), to_string(r.verdict_fixed_ratios));
  out += fmt::format("  fixed height:  {}\n", detail::optimum_line(r.optimal_fixed_height));
  out += fmt::format("                 ΔS(fixed height) = {} m² [{}]\n",
                     fixed(r.delta_S_fixed_height, 1), to_string(r.verdict_fixed_height));
  return out;
}

inline std::string render_report(const ComparisonReport& r, ReportFormat format) {
  if (format == ReportFormat::Json) return report_to_json(r).dump(2) + "\n";
  return render_text(r);
}

} // namespace lshape::casestudy
