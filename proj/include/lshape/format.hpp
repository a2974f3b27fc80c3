#pragma once

#include <cmath>
#include <string>

#include <fmt/format.h>

namespace lshape {

/// Rounds half away from zero at `decimals` places.
inline double round_half_up(double x, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double scaled = x * scale;
  // Nudge by a few ulps so values printed as ...5 in decimal round up even when
  // their binary representation sits just below the midpoint.
  const double nudged = std::nextafter(std::nextafter(std::abs(scaled), INFINITY), INFINITY);
  const double r = std::floor(nudged + 0.5);
  return r == 0.0 ? 0.0 : std::copysign(r, x) / scale;
}

inline std::string fixed(double x, int decimals) {
  return fmt::format("{:.{}f}", round_half_up(x, decimals), decimals);
}

} // namespace lshape
