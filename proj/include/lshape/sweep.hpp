#pragma once

// Parameter sweeps over the envelope model, for contour and surface plots.
// Each preset reproduces the data behind one figure and marks the
// closed-form minima on top of the grid.

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "lshape/closedform.hpp"
#include "lshape/errors.hpp"
#include "lshape/geometry.hpp"

namespace lshape::sweep {

enum class Figure { Fig2, Fig3, Fig5, Fig6 };

inline std::optional<Figure> parse_figure(std::string_view id) {
  if (id == "fig2") return Figure::Fig2;
  if (id == "fig3") return Figure::Fig3;
  if (id == "fig5") return Figure::Fig5;
  if (id == "fig6") return Figure::Fig6;
  return std::nullopt;
}

inline std::string_view to_string(Figure f) {
  switch (f) {
  case Figure::Fig2: return "fig2";
  case Figure::Fig3: return "fig3";
  case Figure::Fig5: return "fig5";
  case Figure::Fig6: return "fig6";
  }
  return "?";
}

struct Axis {
  std::string name;
  std::string unit;
  std::vector<double> samples;
};

struct Marker {
  std::vector<double> coordinates; // in axis order
  double value;
};

/// Row-major grid: the first axis varies slowest.
struct SweepGrid {
  std::string figure;
  std::string quantity;
  std::string unit;
  std::vector<Axis> axes;
  std::vector<double> values;
  std::vector<Marker> minima;

  std::size_t point_count() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.samples.size();
    return n;
  }

  std::vector<double> coordinates(std::size_t flat) const {
    std::vector<double> c(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
      const std::size_t n = axes[a].samples.size();
      c[a] = axes[a].samples[flat % n];
      flat /= n;
    }
    return c;
  }
};

struct Range {
  double lo;
  double hi;
};

/// Overrides applied on top of a figure preset. Unset fields keep the preset.
struct SweepOverrides {
  std::optional<double> volume;
  std::optional<std::vector<double>> ratios; // fig2: r samples; fig5: (r1, r2)
  std::optional<Range> b_range;              // fig2, fig3
  std::optional<Range> r_range;              // fig3: [a, b]
  std::optional<Range> l_range;              // fig5: L1 and L2
  std::optional<Range> r1_range;             // fig6
  std::optional<Range> r2_range;             // fig6
  std::optional<int> samples;                // per continuous axis
};

inline std::vector<double> linspace(Range r, int n) {
  if (n < 2) throw DomainError(fmt::format("a sweep axis needs at least 2 samples (got {})", n));
  if (!(r.lo < r.hi)) throw DomainError(fmt::format("sweep range needs lo < hi (got {},{})", r.lo, r.hi));
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = r.lo + (r.hi - r.lo) * i / (n - 1);
  v.back() = r.hi;
  return v;
}

namespace detail {

template <class F>
void fill_2d(SweepGrid& g, F&& f) {
  g.values.clear();
  g.values.reserve(g.point_count());
  for (double x : g.axes[0].samples) {
    for (double y : g.axes[1].samples) g.values.push_back(f(x, y));
  }
}

inline void require_positive_range(Range r, const char* name) {
  if (!(r.lo > 0.0 && r.lo < r.hi)) {
    throw DomainError(fmt::format("{} range must satisfy 0 < lo < hi (got {},{})", name, r.lo, r.hi));
  }
}

inline SweepGrid fig2(const SweepOverrides& o) {
  const double V = o.volume.value_or(300.0);
  const std::vector<double> ratios =
      o.ratios.value_or(std::vector<double>{1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0});
  const Range b = o.b_range.value_or(Range{2.0, 12.0});
  require_positive_range(b, "B");
  if (ratios.empty()) throw DomainError("fig2 needs at least one ratio");

  SweepGrid g{"fig2", "S", "m²", {{"r", "", ratios}, {"B", "m", linspace(b, o.samples.value_or(101))}}, {}, {}};
  for (double r : ratios) {
    const auto opt = optimize_sym_fixed_ratio(V, SymRatio(r));
    g.minima.push_back({{r, opt.sym().width()}, opt.envelope});
  }
  fill_2d(g, [V](double r, double B) { return model::sym_envelope_parametric(B, r, V); });
  return g;
}

inline SweepGrid fig3(const SweepOverrides& o) {
  const double V = o.volume.value_or(200.0);
  const Range rr = o.r_range.value_or(Range{3.0, 4.0});
  const SymRatioInterval bounds(rr.lo, rr.hi);
  const Range b = o.b_range.value_or(Range{1.0, 10.0});
  require_positive_range(b, "B");

  SweepGrid g{"fig3", "S", "m²",
              {{"r", "", linspace(rr, o.samples.value_or(11))},
               {"B", "m", linspace(b, o.samples.value_or(91))}},
              {}, {}};
  const auto opt = optimize_sym_ratio_interval(V, bounds);
  g.minima.push_back({{bounds.lo().value(), opt.sym().width()}, opt.envelope});
  fill_2d(g, [V](double r, double B) { return model::sym_envelope_parametric(B, r, V); });
  return g;
}

inline SweepGrid fig5(const SweepOverrides& o) {
  const double V = o.volume.value_or(300.0);
  const std::vector<double> rv = o.ratios.value_or(std::vector<double>{0.4, 0.6});
  if (rv.size() != 2) throw DomainError("fig5 takes exactly two ratios r1,r2");
  const AsymRatios ratios(rv[0], rv[1]);
  const Range l = o.l_range.value_or(Range{4.0, 25.0});
  require_positive_range(l, "L");
  const int n = o.samples.value_or(85);

  SweepGrid g{"fig5", "S", "m²", {{"L1", "m", linspace(l, n)}, {"L2", "m", linspace(l, n)}}, {}, {}};
  const auto opt = optimize_asym_fixed_ratios(V, ratios);
  g.minima.push_back({{opt.asym().L1(), opt.asym().L2()}, opt.envelope});
  const double r1 = rv[0], r2 = rv[1];
  fill_2d(g, [=](double L1, double L2) { return model::asym_envelope_at_volume(L1, L2, r1, r2, V); });
  return g;
}

inline SweepGrid fig6(const SweepOverrides& o) {
  const double V = o.volume.value_or(200.0);
  const Range a = o.r1_range.value_or(Range{0.3, 0.5});
  const Range b = o.r2_range.value_or(Range{0.2, 0.8});
  const AsymRatioInterval b1(a.lo, a.hi), b2(b.lo, b.hi);

  SweepGrid g{"fig6", "S_min", "m²",
              {{"r1", "", linspace(a, o.samples.value_or(21))},
               {"r2", "", linspace(b, o.samples.value_or(61))}},
              {}, {}};
  const auto opt = optimize_asym_ratio_box(V, b1, b2);
  g.minima.push_back({{b1.hi().value(), b2.hi().value()}, opt.envelope});
  fill_2d(g, [V](double r1, double r2) {
    return asym_min_envelope(V, FillFactor{model::fill_factor(r1, r2)});
  });
  return g;
}

} // namespace detail

/// Builds the grid for `figure`; the result depends only on the arguments.
inline SweepGrid make_sweep(Figure figure, const SweepOverrides& o = {}) {
  if (o.volume) lshape::detail::require_positive(*o.volume, "V");
  switch (figure) {
  case Figure::Fig2: return detail::fig2(o);
  case Figure::Fig3: return detail::fig3(o);
  case Figure::Fig5: return detail::fig5(o);
  case Figure::Fig6: return detail::fig6(o);
  }
  throw DomainError("unknown figure");
}

struct GridPoint {
  std::vector<double> coordinates;
  double value;
};

inline GridPoint grid_minimum(const SweepGrid& g) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < g.values.size(); ++i) {
    if (g.values[i] < g.values[best]) best = i;
  }
  return {g.coordinates(best), g.values.at(best)};
}

/// Long-form CSV: one row per grid point, header `axis1,axis2,...,value`.
/// Closed-form minima precede the header as `#` comment lines.
inline void write_csv(std::ostream& out, const SweepGrid& g) {
  for (const auto& m : g.minima) {
    out << "# minimum";
    for (std::size_t a = 0; a < g.axes.size(); ++a) {
      out << fmt::format(" {}={}", g.axes[a].name, m.coordinates[a]);
    }
    out << fmt::format(" {}={}\n", g.quantity, m.value);
  }
  for (const auto& a : g.axes) out << a.name << ',';
  out << "value\n";
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    for (double c : g.coordinates(i)) out << fmt::format("{},", c);
    out << fmt::format("{}\n", g.values[i]);
  }
}

inline nlohmann::ordered_json to_json(const SweepGrid& g) {
  nlohmann::ordered_json j;
  j["figure"] = g.figure;
  j["quantity"] = g.quantity;
  j["unit"] = g.unit;
  j["axes"] = nlohmann::ordered_json::array();
  for (const auto& a : g.axes) {
    j["axes"].push_back({{"name", a.name}, {"unit", a.unit}, {"samples", a.samples}});
  }
  j["values"] = g.values;
  j["minima"] = nlohmann::ordered_json::array();
  for (const auto& m : g.minima) {
    j["minima"].push_back({{"coordinates", m.coordinates}, {"value", m.value}});
  }
  return j;
}

} // namespace lshape::sweep
