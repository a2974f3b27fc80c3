#pragma once

// Named scenario instances: the worked examples and seeded random draws used
// by the `check` command and the acceptance suite.

#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <string_view>

#include "lshape/oracle.hpp"

namespace lshape::scenarios {

enum class Kind { SymFixed, SymInterval, AsymFixed, AsymBox, AsymHeight };

inline constexpr std::array<Kind, 5> kAllKinds{Kind::SymFixed, Kind::SymInterval, Kind::AsymFixed,
                                               Kind::AsymBox, Kind::AsymHeight};

inline std::string_view to_string(Kind k) {
  switch (k) {
  case Kind::SymFixed: return "sym-fixed";
  case Kind::SymInterval: return "sym-interval";
  case Kind::AsymFixed: return "asym-fixed";
  case Kind::AsymBox: return "asym-box";
  case Kind::AsymHeight: return "asym-height";
  }
  return "?";
}

inline std::optional<Kind> parse_kind(std::string_view s) {
  for (Kind k : kAllKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

/// Worked example for each scenario. The fixed-height case uses House A.
inline oracle::ScenarioInput worked_example(Kind k) {
  using namespace oracle;
  switch (k) {
  case Kind::SymFixed: return SymFixedRatioInput{300.0, SymRatio(2.0)};
  case Kind::SymInterval: return SymRatioIntervalInput{200.0, SymRatioInterval(3.0, 4.0)};
  case Kind::AsymFixed: return AsymFixedRatiosInput{300.0, AsymRatios(0.4, 0.6)};
  case Kind::AsymBox:
    return AsymRatioBoxInput{200.0, AsymRatioInterval(0.3, 0.5), AsymRatioInterval(0.2, 0.8)};
  case Kind::AsymHeight: {
    const AsymDims house_a(13.7, 14.9, 8.7, 4.6, 3.6);
    return AsymFixedHeightInput{asym_volume(house_a), 3.6, house_a.ratios()};
  }
  }
  throw DomainError("unknown scenario kind");
}

/// Random instance with V in [10, 5000], symmetric ratios in (1, 10] and
/// asymmetric ratios in [0.05, 0.95].
inline oracle::ScenarioInput random_instance(Kind k, std::mt19937_64& rng) {
  using namespace oracle;
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  const double V = uniform(10.0, 5000.0);
  switch (k) {
  case Kind::SymFixed: return SymFixedRatioInput{V, SymRatio(uniform(1.01, 10.0))};
  case Kind::SymInterval: {
    const double lo = uniform(1.01, 8.0);
    const double width = uniform(0.05, 2.0);
    return SymRatioIntervalInput{V, SymRatioInterval(lo, lo + width)};
  }
  case Kind::AsymFixed: {
    const double r1 = uniform(0.05, 0.95);
    const double r2 = uniform(0.05, 0.95);
    return AsymFixedRatiosInput{V, AsymRatios(r1, r2)};
  }
  case Kind::AsymBox: {
    auto interval = [&] {
      const double lo = uniform(0.05, 0.85);
      const double width = uniform(0.02, 0.95 - lo);
      return AsymRatioInterval(lo, lo + width);
    };
    const auto b1 = interval();
    const auto b2 = interval();
    return AsymRatioBoxInput{V, b1, b2};
  }
  case Kind::AsymHeight: {
    const double r1 = uniform(0.05, 0.95);
    const double r2 = uniform(0.05, 0.95);
    const double h = std::cbrt(V) * uniform(0.2, 2.0);
    return AsymFixedHeightInput{V, h, AsymRatios(r1, r2)};
  }
  }
  throw DomainError("unknown scenario kind");
}

} // namespace lshape::scenarios
