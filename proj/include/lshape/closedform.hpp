#pragma once

// Closed-form envelope minimizers for every constraint scenario.

#include <cmath>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "lshape/errors.hpp"
#include "lshape/geometry.hpp"

namespace lshape {

enum class Scenario {
  SymFixedRatio,
  SymRatioInterval,
  AsymFixedRatios,
  AsymRatioBox,
  AsymFixedHeight,
  DegenerateCuboid,
};

inline std::string_view to_string(Scenario s) {
  switch (s) {
  case Scenario::SymFixedRatio: return "SymFixedRatio";
  case Scenario::SymRatioInterval: return "SymRatioInterval";
  case Scenario::AsymFixedRatios: return "AsymFixedRatios";
  case Scenario::AsymRatioBox: return "AsymRatioBox";
  case Scenario::AsymFixedHeight: return "AsymFixedHeight";
  case Scenario::DegenerateCuboid: return "DegenerateCuboid";
  }
  return "?";
}

enum class BoundSide { Lower, Upper };

inline std::string_view to_string(BoundSide s) { return s == BoundSide::Lower ? "lower" : "upper"; }

struct ActiveConstraint {
  std::string variable; // "r", "r1" or "r2"
  BoundSide side;
  double bound;

  friend bool operator==(const ActiveConstraint&, const ActiveConstraint&) = default;
};

/// Closed interval [lo, hi] of admissible ratios with lo < hi. Each endpoint
/// is validated as a `Ratio`, so symmetric intervals live above 1 and
/// asymmetric ones inside (0, 1).
template <class Ratio>
class RatioInterval {
public:
  RatioInterval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo < hi)) {
      throw DomainError(fmt::format("ratio interval needs lo < hi (got [{}, {}])", lo, hi));
    }
  }

  Ratio lo() const noexcept { return lo_; }
  Ratio hi() const noexcept { return hi_; }
  bool contains(double r) const noexcept { return r >= lo_.value() && r <= hi_.value(); }

private:
  Ratio lo_;
  Ratio hi_;
};

using SymRatioInterval = RatioInterval<SymRatio>;
using AsymRatioInterval = RatioInterval<AsymRatio>;

struct OptimizationResult {
  Scenario scenario;
  std::variant<SymDims, AsymDims> dims;
  double envelope;
  double input_volume;
  std::vector<ActiveConstraint> active_constraints;
  bool degenerate = false;

  bool is_symmetric() const noexcept { return std::holds_alternative<SymDims>(dims); }
  const SymDims& sym() const { return std::get<SymDims>(dims); }
  const AsymDims& asym() const { return std::get<AsymDims>(dims); }

  double volume_from_dims() const {
    return is_symmetric() ? sym_volume(sym()) : asym_volume(asym());
  }
  double envelope_from_dims() const {
    return is_symmetric() ? sym_envelope(sym()) : asym_envelope(asym());
  }
};

/// Relative tolerance for the volume / envelope recomputation invariant.
inline constexpr double kResultConsistency = 1e-10;

namespace detail {

inline bool rel_close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

inline OptimizationResult checked(OptimizationResult r) {
  if (!rel_close(r.volume_from_dims(), r.input_volume, kResultConsistency) ||
      !rel_close(r.envelope_from_dims(), r.envelope, kResultConsistency)) {
    throw InconsistencyError(fmt::format("{} result fails volume/envelope recomputation",
                                         to_string(r.scenario)));
  }
  return r;
}

} // namespace detail

/// Minimal envelope at fixed V and r.
inline double sym_min_envelope(double volume, SymRatio r) {
  const double x = r.value();
  return 3.0 * std::cbrt(4.0 * volume * volume * x * x / (2.0 * x - 1.0));
}

/// Minimal envelope at fixed V and fill factor k.
inline double asym_min_envelope(double volume, FillFactor k) {
  return 3.0 * std::cbrt(4.0 * volume * volume / k.value);
}

inline OptimizationResult optimize_sym_fixed_ratio(double volume, SymRatio r) {
  detail::require_positive(volume, "V");
  if (r.is_degenerate()) {
    throw DegeneracyError("r = 1 has no L-shaped optimum; use detect_degenerate_cuboid");
  }
  const double x = r.value();
  const double m = 2.0 * x - 1.0;
  const double B = std::cbrt(2.0 * volume * x / (m * m));
  const double L = x * B;
  const double H = std::cbrt(m * volume) / std::pow(2.0 * x, 2.0 / 3.0);
  return detail::checked({Scenario::SymFixedRatio, SymDims(L, B, H), sym_min_envelope(volume, r),
                          volume, {}, false});
}

/// The envelope minimum over [lo, hi] sits on the lower bound.
inline OptimizationResult optimize_sym_ratio_interval(double volume, const SymRatioInterval& bounds) {
  OptimizationResult res = optimize_sym_fixed_ratio(volume, bounds.lo());
  res.scenario = Scenario::SymRatioInterval;
  res.active_constraints = {{"r", BoundSide::Lower, bounds.lo().value()}};
  return res;
}

inline OptimizationResult optimize_asym_fixed_ratios(double volume, const AsymRatios& r) {
  detail::require_positive(volume, "V");
  if (r.is_degenerate()) {
    throw DegeneracyError("a square wing has no L-shaped optimum; use detect_degenerate_cuboid");
  }
  const FillFactor k = fill_factor(r);
  const double L = std::cbrt(2.0 * volume / (k.value * k.value));
  const double H = std::cbrt(k.value * volume / 4.0);
  AsymDims dims(L, L, r.r1.value() * L, r.r2.value() * L, H);
  return detail::checked({Scenario::AsymFixedRatios, dims, asym_min_envelope(volume, k), volume,
                          {}, false});
}

/// Both upper bounds are active at the optimum.
inline OptimizationResult optimize_asym_ratio_box(double volume, const AsymRatioInterval& r1_range,
                                                  const AsymRatioInterval& r2_range) {
  OptimizationResult res =
      optimize_asym_fixed_ratios(volume, AsymRatios(r1_range.hi(), r2_range.hi()));
  res.scenario = Scenario::AsymRatioBox;
  res.active_constraints = {{"r1", BoundSide::Upper, r1_range.hi().value()},
                            {"r2", BoundSide::Upper, r2_range.hi().value()}};
  return res;
}

inline OptimizationResult optimize_asym_fixed_height(double volume, double height,
                                                     const AsymRatios& r) {
  detail::require_positive(volume, "V");
  detail::require_positive(height, "H");
  if (r.is_degenerate()) {
    throw DegeneracyError("a square wing has no L-shaped optimum; use detect_degenerate_cuboid");
  }
  const double k = fill_factor(r).value;
  const double L = std::sqrt(volume / (height * k));
  AsymDims dims(L, L, r.r1.value() * L, r.r2.value() * L, height);
  return detail::checked({Scenario::AsymFixedHeight, dims, volume / height + 4.0 * height * L,
                          volume, {}, false});
}

/// Unconstrained optimum at fixed volume: a square footprint (r = 1).
/// Returned tagged degenerate so callers see that the L-form is gone.
inline OptimizationResult detect_degenerate_cuboid(double volume) {
  detail::require_positive(volume, "V");
  const double side = std::cbrt(2.0 * volume);
  const double H = std::cbrt(volume / 4.0);
  return detail::checked({Scenario::DegenerateCuboid, SymDims::cuboid(side, H),
                          3.0 * side * side, volume, {}, true});
}

/// S / S_min at fixed V and r; 1 means the design is already optimal.
struct CompactnessRatio {
  double value;
};

/// `tolerance` is the relative slack allowed below S_min (e.g. for rounded
/// inputs); anything inside it scores exactly 1.
inline CompactnessRatio compactness(double envelope, double volume, SymRatio r,
                                    double tolerance = 1e-9) {
  detail::require_positive(envelope, "S");
  detail::require_positive(volume, "V");
  if (r.is_degenerate()) throw DegeneracyError("compactness is defined for r > 1 only");
  const double smin = sym_min_envelope(volume, r);
  const double ratio = envelope / smin;
  if (ratio < 1.0 - tolerance) {
    throw InconsistencyError(fmt::format(
        "S = {} is below the minimum {} for V = {}, r = {}; no symmetric L-plan matches",
        envelope, smin, volume, r.value()));
  }
  return {std::max(ratio, 1.0)};
}

inline CompactnessRatio compactness(const SymDims& d, double tolerance = 1e-9) {
  return compactness(sym_envelope(d), sym_volume(d), SymRatio(d.ratio()), tolerance);
}

} // namespace lshape
