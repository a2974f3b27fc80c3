#pragma once

// Geometric model of flat-roofed L-shaped plans.
//
// Two aspect-ratio conventions are in use and are kept as distinct types:
//   SymRatio   r  = L / B  > 1   (symmetric plan, length over width)
//   AsymRatio  ri = Bi / Li < 1  (asymmetric plan, width over length)
// Envelope areas exclude the ground slab.

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "lshape/errors.hpp"

namespace lshape {

/// Relative exclusion band around forbidden boundaries (r = 1, ri = 1, L = B).
inline constexpr double kBoundaryTolerance = 1e-9;

// Unchecked kernels on raw doubles. Callers guarantee the domain.
namespace model {

inline double sym_floor_area(double L, double B) { return 2.0 * L * B - B * B; }

inline double sym_volume(double L, double B, double H) { return H * sym_floor_area(L, B); }

inline double sym_envelope(double L, double B, double H) {
  return 4.0 * L * H + sym_floor_area(L, B);
}

/// Envelope as a function of width at fixed ratio and volume.
inline double sym_envelope_parametric(double B, double r, double V) {
  const double m = 2.0 * r - 1.0;
  return 4.0 * V * r / (B * m) + B * B * m;
}

inline double fill_factor(double r1, double r2) { return r1 + r2 - r1 * r2; }

inline double asym_volume(double L1, double L2, double r1, double r2, double H) {
  return H * L1 * L2 * fill_factor(r1, r2);
}

inline double asym_envelope(double L1, double L2, double r1, double r2, double H) {
  return L1 * L2 * fill_factor(r1, r2) + 2.0 * (L1 + L2) * H;
}

/// Envelope with the height eliminated through the volume.
inline double asym_envelope_at_volume(double L1, double L2, double r1, double r2, double V) {
  const double footprint = L1 * L2 * fill_factor(r1, r2);
  return footprint + 2.0 * V * (L1 + L2) / footprint;
}

} // namespace model

namespace detail {

inline void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw DomainError(fmt::format("{} must be a positive finite number (got {})", name, v));
  }
}

inline bool near(double a, double b, double rel = kBoundaryTolerance) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

} // namespace detail

class SymRatio {
public:
  explicit SymRatio(double r) : value_(r) {
    if (!std::isfinite(r)) throw DomainError("symmetric ratio r = L/B must be finite");
    if (detail::near(r, 1.0)) {
      throw DegeneracyError(fmt::format(
          "symmetric ratio r = {} collapses the L-form into a cuboid (r = L/B must exceed 1); "
          "use the degenerate-cuboid solution instead",
          r));
    }
    if (r < 1.0) {
      throw DomainError(fmt::format("symmetric ratio r = L/B must exceed 1 (got {})", r));
    }
  }

  /// r = 1: the cuboid limit.
  static SymRatio degenerate() { return SymRatio(1.0, true); }

  double value() const noexcept { return value_; }
  bool is_degenerate() const noexcept { return degenerate_; }

private:
  SymRatio(double r, bool degenerate) : value_(r), degenerate_(degenerate) {}

  double value_;
  bool degenerate_ = false;
};

class AsymRatio {
public:
  explicit AsymRatio(double r) : value_(r) {
    if (!std::isfinite(r) || r <= 0.0) {
      throw DomainError(fmt::format("wing ratio B/L must lie in (0, 1) (got {})", r));
    }
    if (detail::near(r, 1.0)) {
      throw DegeneracyError(fmt::format(
          "wing ratio B/L = {} makes the wing square and the plan a cuboid", r));
    }
    if (r > 1.0) {
      throw DomainError(fmt::format("wing ratio B/L must lie in (0, 1) (got {})", r));
    }
  }

  static AsymRatio degenerate() { return AsymRatio(1.0, true); }

  double value() const noexcept { return value_; }
  bool is_degenerate() const noexcept { return degenerate_; }

private:
  AsymRatio(double r, bool degenerate) : value_(r), degenerate_(degenerate) {}

  double value_;
  bool degenerate_ = false;
};

struct AsymRatios {
  AsymRatio r1;
  AsymRatio r2;

  AsymRatios(AsymRatio a, AsymRatio b) : r1(a), r2(b) {}
  AsymRatios(double a, double b) : r1(a), r2(b) {}

  bool is_degenerate() const noexcept { return r1.is_degenerate() || r2.is_degenerate(); }
};

/// Fraction of the bounding rectangle L1 x L2 covered by the footprint.
struct FillFactor {
  double value;
};

inline FillFactor fill_factor(const AsymRatios& r) {
  return {model::fill_factor(r.r1.value(), r.r2.value())};
}

class SymDims {
public:
  SymDims(double length, double width, double height) : L_(length), B_(width), H_(height) {
    detail::require_positive(length, "L");
    detail::require_positive(width, "B");
    detail::require_positive(height, "H");
    if (detail::near(length, width)) {
      throw DegeneracyError("L equals B: the plan is a cuboid, not an L-shape");
    }
    if (length < width) {
      throw DomainError(fmt::format("wing length L = {} must exceed wing width B = {}", length, width));
    }
  }

  /// Square footprint of side `side`; the L-form is lost.
  static SymDims cuboid(double side, double height) {
    detail::require_positive(side, "side");
    detail::require_positive(height, "H");
    return SymDims(side, side, height, true);
  }

  double length() const noexcept { return L_; }
  double width() const noexcept { return B_; }
  double height() const noexcept { return H_; }
  double ratio() const noexcept { return L_ / B_; }
  bool is_degenerate() const noexcept { return degenerate_; }

private:
  SymDims(double L, double B, double H, bool degenerate)
      : L_(L), B_(B), H_(H), degenerate_(degenerate) {}

  double L_, B_, H_;
  bool degenerate_ = false;
};

class AsymDims {
public:
  AsymDims(double L1, double L2, double B1, double B2, double H)
      : L1_(L1), L2_(L2), B1_(B1), B2_(B2), H_(H) {
    validate(false);
  }

  /// Accepts Bi = Li on at least one wing; the result is tagged degenerate.
  static AsymDims degenerate(double L1, double L2, double B1, double B2, double H) {
    AsymDims d(L1, L2, B1, B2, H, true);
    d.validate(true);
    return d;
  }

  double L1() const noexcept { return L1_; }
  double L2() const noexcept { return L2_; }
  double B1() const noexcept { return B1_; }
  double B2() const noexcept { return B2_; }
  double H() const noexcept { return H_; }
  double r1() const noexcept { return B1_ / L1_; }
  double r2() const noexcept { return B2_ / L2_; }
  double fill() const noexcept { return model::fill_factor(r1(), r2()); }
  bool is_degenerate() const noexcept { return degenerate_; }

  /// Throws DegeneracyError for degenerate dims.
  AsymRatios ratios() const { return AsymRatios(r1(), r2()); }

private:
  AsymDims(double L1, double L2, double B1, double B2, double H, bool degenerate)
      : L1_(L1), L2_(L2), B1_(B1), B2_(B2), H_(H), degenerate_(degenerate) {}

  void validate(bool allow_degenerate) const {
    detail::require_positive(L1_, "L1");
    detail::require_positive(L2_, "L2");
    detail::require_positive(B1_, "B1");
    detail::require_positive(B2_, "B2");
    detail::require_positive(H_, "H");
    bool any_square = false;
    check_wing(1, L1_, B1_, allow_degenerate, any_square);
    check_wing(2, L2_, B2_, allow_degenerate, any_square);
    if (allow_degenerate && !any_square) {
      throw DomainError("degenerate dims require at least one wing with B = L");
    }
  }

  static void check_wing(int wing, double L, double B, bool allow_degenerate, bool& square) {
    if (detail::near(L, B)) {
      if (!allow_degenerate) {
        throw DegeneracyError(fmt::format(
            "degenerate wing {}: B{} = L{} = {} collapses the L-form", wing, wing, wing, L));
      }
      square = true;
      return;
    }
    if (B > L) {
      throw DomainError(fmt::format("wing {}: width B{} = {} must be smaller than length L{} = {}",
                                    wing, wing, B, wing, L));
    }
  }

  double L1_, L2_, B1_, B2_, H_;
  bool degenerate_ = false;
};

inline double sym_volume(const SymDims& d) {
  return model::sym_volume(d.length(), d.width(), d.height());
}

inline double sym_envelope(const SymDims& d) {
  return model::sym_envelope(d.length(), d.width(), d.height());
}

inline double sym_floor_area(const SymDims& d) {
  return model::sym_floor_area(d.length(), d.width());
}

inline double sym_envelope_parametric(double width, SymRatio r, double volume) {
  detail::require_positive(width, "B");
  detail::require_positive(volume, "V");
  if (r.is_degenerate()) throw DegeneracyError("parametric envelope needs r > 1");
  return model::sym_envelope_parametric(width, r.value(), volume);
}

inline double asym_volume(const AsymDims& d) {
  return model::asym_volume(d.L1(), d.L2(), d.r1(), d.r2(), d.H());
}

inline double asym_envelope(const AsymDims& d) {
  return model::asym_envelope(d.L1(), d.L2(), d.r1(), d.r2(), d.H());
}

inline double asym_height_for_volume(double volume, double L1, double L2, const AsymRatios& r) {
  detail::require_positive(volume, "V");
  detail::require_positive(L1, "L1");
  detail::require_positive(L2, "L2");
  return volume / (L1 * L2 * fill_factor(r).value);
}

/// A symmetric plan viewed as an asymmetric one with equal wings.
inline AsymDims as_asymmetric(const SymDims& d) {
  if (d.is_degenerate()) {
    return AsymDims::degenerate(d.length(), d.length(), d.width(), d.width(), d.height());
  }
  return AsymDims(d.length(), d.length(), d.width(), d.width(), d.height());
}

} // namespace lshape
