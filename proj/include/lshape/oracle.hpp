#pragma once

// Independent numerical checks for the closed-form optimizers: derivative-free
// minimizers that only ever evaluate the envelope model, analytic gradients of
// the Lagrangians, and KKT certification with recovered multipliers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "lshape/closedform.hpp"
#include "lshape/errors.hpp"
#include "lshape/geometry.hpp"

namespace lshape::oracle {

struct Interval {
  double lo;
  double hi;

  double width() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

/// One-dimensional objective with its declared domain.
struct ScalarObjective {
  std::function<double(double)> f;
  Interval domain;
};

struct ScalarMinimum {
  double argmin;
  double value;
};

namespace detail {

template <class F>
double eval_finite(F& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    throw EvaluationError(fmt::format("objective is not finite at x = {}", x), x);
  }
  return v;
}

} // namespace detail

/// Golden-section search on [lo, hi]. Stops once the bracket is narrower than
/// tol * max(1, |x|). Resolution is bounded below by roughly sqrt(machine
/// epsilon) relative, since values closer than that cannot be ordered.
template <class F>
ScalarMinimum golden_section_min(F&& f, double lo, double hi, double tol,
                                 int max_iterations = 500) {
  if (!(lo < hi)) throw DomainError(fmt::format("golden section needs lo < hi ([{}, {}])", lo, hi));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = detail::eval_finite(f, c);
  double fd = detail::eval_finite(f, d);
  for (int it = 0; it < max_iterations; ++it) {
    if (b - a <= tol * std::max(1.0, std::abs(0.5 * (a + b)))) break;
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = detail::eval_finite(f, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = detail::eval_finite(f, d);
    }
  }
  return fc < fd ? ScalarMinimum{c, fc} : ScalarMinimum{d, fd};
}

inline ScalarMinimum golden_section_min(const ScalarObjective& obj, double lo, double hi,
                                        double tol) {
  if (!obj.domain.contains(lo) || !obj.domain.contains(hi)) {
    throw DomainError(fmt::format("bracket [{}, {}] leaves the objective domain [{}, {}]", lo, hi,
                                  obj.domain.lo, obj.domain.hi));
  }
  return golden_section_min(obj.f, lo, hi, tol);
}

/// Grows a bracket around `seed` until both ends exceed twice f(seed), which
/// for a unimodal f guarantees the minimizer lies inside. The lower end never
/// drops below `floor`.
template <class F>
Interval expand_bracket(F&& f, double seed, double floor) {
  const double target = 2.0 * detail::eval_finite(f, seed);
  double hi = 2.0 * seed;
  for (int i = 0; i < 200 && detail::eval_finite(f, hi) <= target; ++i) hi *= 2.0;
  double lo = 0.5 * seed;
  for (int i = 0; i < 200 && lo > floor && detail::eval_finite(f, lo) <= target; ++i) lo *= 0.5;
  return {std::max(lo, floor), hi};
}

template <std::size_t N>
struct GridMinimum {
  std::array<double, N> argmin;
  double value;
};

/// Exhaustive grid search with successive refinement: each level evaluates
/// points_per_axis^N nodes on the current box (endpoints included), then
/// shrinks the box by `shrink` around the incumbent, clamped to the original
/// box. Ties keep the first node visited, so results are deterministic.
template <std::size_t N, class F>
GridMinimum<N> grid_refine_min(F&& f, const std::array<Interval, N>& box, int levels,
                               int points_per_axis = 33, double shrink = 3.0) {
  if (levels < 1) throw DomainError("grid refinement needs at least one level");
  if (points_per_axis < 2) throw DomainError("grid refinement needs at least 2 points per axis");
  for (const auto& iv : box) {
    if (!(iv.lo <= iv.hi)) throw DomainError("grid refinement box is empty");
  }

  GridMinimum<N> best{{}, std::numeric_limits<double>::infinity()};
  std::array<Interval, N> current = box;
  std::array<double, N> x{};
  for (int level = 0; level < levels; ++level) {
    std::array<int, N> idx{};
    while (true) {
      for (std::size_t a = 0; a < N; ++a) {
        x[a] = current[a].lo + current[a].width() * idx[a] / (points_per_axis - 1);
      }
      const double v = f(x);
      if (!std::isfinite(v)) {
        throw EvaluationError(fmt::format("objective is not finite at {}", x), x[0]);
      }
      if (v < best.value) best = {x, v};

      std::size_t axis = 0;
      while (axis < N && ++idx[axis] == points_per_axis) idx[axis++] = 0;
      if (axis == N) break;
    }
    for (std::size_t a = 0; a < N; ++a) {
      const double half = current[a].width() / (2.0 * shrink);
      double lo = best.argmin[a] - half;
      double hi = best.argmin[a] + half;
      if (lo < box[a].lo) {
        hi += box[a].lo - lo;
        lo = box[a].lo;
      }
      if (hi > box[a].hi) {
        lo -= hi - box[a].hi;
        hi = box[a].hi;
      }
      current[a] = {std::max(lo, box[a].lo), hi};
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Analytic gradients

struct SymGradient {
  double dB;
  double dr;
};

/// Gradient of the symmetric envelope S(B, r) at fixed volume.
inline SymGradient sym_envelope_gradient(double B, double r, double V) {
  const double m = 2.0 * r - 1.0;
  return {2.0 * B * m - 4.0 * V * r / (B * B * m), -4.0 * V / (B * m * m) + 2.0 * B * B};
}

/// Gradient of the asymmetric envelope S(L1, L2, r1, r2) at fixed volume.
inline std::array<double, 4> asym_envelope_gradient(double L1, double L2, double r1, double r2,
                                                    double V) {
  const double k = model::fill_factor(r1, r2);
  const double dk = L1 * L2 - 2.0 * V * (L1 + L2) / (L1 * L2 * k * k);
  return {L2 * k - 2.0 * V / (L1 * L1 * k), L1 * k - 2.0 * V / (L2 * L2 * k), dk * (1.0 - r2),
          dk * (1.0 - r1)};
}

/// Envelope at fixed V, H and fill factor k, with L2 eliminated.
inline double fixed_height_envelope(double L1, double V, double H, double k) {
  return V / H + 2.0 * H * (L1 + V / (L1 * H * k));
}

inline double fixed_height_envelope_derivative(double L1, double V, double H, double k) {
  return 2.0 * H - 2.0 * V / (L1 * L1 * k);
}

struct SymMultipliers {
  double lower = 0.0; // r >= lo
  double upper = 0.0; // r <= hi
};

struct AsymMultipliers {
  double r1_lower = 0.0;
  double r1_upper = 0.0;
  double r2_lower = 0.0;
  double r2_upper = 0.0;
};

inline double sym_lagrangian(double B, double r, double V, const SymRatioInterval& bounds,
                             const SymMultipliers& m) {
  return model::sym_envelope_parametric(B, r, V) + m.lower * (bounds.lo().value() - r) +
         m.upper * (r - bounds.hi().value());
}

inline SymGradient sym_lagrangian_gradient(double B, double r, double V, const SymMultipliers& m) {
  SymGradient g = sym_envelope_gradient(B, r, V);
  g.dr += -m.lower + m.upper;
  return g;
}

inline double asym_lagrangian(double L1, double L2, double r1, double r2, double V,
                              const AsymRatioInterval& b1, const AsymRatioInterval& b2,
                              const AsymMultipliers& m) {
  return model::asym_envelope_at_volume(L1, L2, r1, r2, V) + m.r1_lower * (b1.lo().value() - r1) +
         m.r1_upper * (r1 - b1.hi().value()) + m.r2_lower * (b2.lo().value() - r2) +
         m.r2_upper * (r2 - b2.hi().value());
}

inline std::array<double, 4> asym_lagrangian_gradient(double L1, double L2, double r1, double r2,
                                                      double V, const AsymMultipliers& m) {
  auto g = asym_envelope_gradient(L1, L2, r1, r2, V);
  g[2] += -m.r1_lower + m.r1_upper;
  g[3] += -m.r2_lower + m.r2_upper;
  return g;
}

// ---------------------------------------------------------------------------
// KKT certification

struct Multiplier {
  std::string constraint;
  double value;
};

/// Stationarity and slackness are normalized: each gradient component is
/// scaled by |x_i| / S and each lambda_i * g_i by 1 / S.
struct KktTolerances {
  double stationarity = 1e-8;
  double primal = 1e-12;
  double dual = 1e-12;
  double slackness = 1e-8;
};

struct KktReport {
  std::vector<Multiplier> multipliers;
  double stationarity_residual = 0.0;
  double primal_violation = 0.0;
  double dual_violation = 0.0; // most negative multiplier, 0 if none
  double slackness_residual = 0.0;
  bool passed = false;
  std::string diagnostic;
};

/// Distance to a bound under which the bound is treated as active.
inline constexpr double kActiveSetProximity = 1e-9;

namespace detail {

enum class Active { None, Lower, Upper, Both };

inline Active active_side(double r, double lo, double hi) {
  const bool at_lo = std::abs(r - lo) <= kActiveSetProximity;
  const bool at_hi = std::abs(r - hi) <= kActiveSetProximity;
  if (at_lo && at_hi) return Active::Both;
  if (at_lo) return Active::Lower;
  if (at_hi) return Active::Upper;
  return Active::None;
}

/// Multipliers (lower, upper) that zero dS/dr - lambda_lo + lambda_hi on the
/// active side. Returns false when the active set is singular.
inline bool recover_pair(Active side, double dS, double& lower, double& upper) {
  lower = upper = 0.0;
  switch (side) {
  case Active::None: return true;
  case Active::Lower: lower = dS; return true;
  case Active::Upper: upper = -dS; return true;
  case Active::Both: return false;
  }
  return false;
}

inline void finish(KktReport& rep, const KktTolerances& tol) {
  rep.dual_violation = 0.0;
  for (const auto& m : rep.multipliers) rep.dual_violation = std::min(rep.dual_violation, m.value);
  rep.passed = rep.diagnostic.empty() && rep.stationarity_residual <= tol.stationarity &&
               rep.primal_violation <= tol.primal && rep.dual_violation >= -tol.dual &&
               rep.slackness_residual <= tol.slackness;
}

} // namespace detail

struct SymCandidate {
  double B;
  double r;
};

struct AsymCandidate {
  double L1;
  double L2;
  double r1;
  double r2;
};

inline KktReport kkt_check_sym(double V, const SymRatioInterval& bounds, SymCandidate c,
                               const KktTolerances& tol = {}) {
  lshape::detail::require_positive(V, "V");
  lshape::detail::require_positive(c.B, "candidate B");
  if (!(c.r > 0.5)) throw DomainError("candidate r must exceed 1/2 (pole of the envelope)");

  const double lo = bounds.lo().value();
  const double hi = bounds.hi().value();
  const double S = model::sym_envelope_parametric(c.B, c.r, V);
  const SymGradient grad = sym_envelope_gradient(c.B, c.r, V);

  KktReport rep;
  SymMultipliers m;
  if (!detail::recover_pair(detail::active_side(c.r, lo, hi), grad.dr, m.lower, m.upper)) {
    rep.diagnostic = "both bounds active: multiplier system is singular";
  }
  rep.multipliers = {{"r lower", m.lower}, {"r upper", m.upper}};

  const SymGradient gl = sym_lagrangian_gradient(c.B, c.r, V, m);
  rep.stationarity_residual =
      std::max(std::abs(gl.dB) * c.B / S, std::abs(gl.dr) * std::abs(c.r) / S);
  const double g_lo = lo - c.r;
  const double g_hi = c.r - hi;
  rep.primal_violation = std::max({0.0, g_lo, g_hi});
  rep.slackness_residual = std::max(std::abs(m.lower * g_lo), std::abs(m.upper * g_hi)) / S;
  detail::finish(rep, tol);
  return rep;
}

inline KktReport kkt_check_asym(double V, const AsymRatioInterval& r1_range,
                                const AsymRatioInterval& r2_range, AsymCandidate c,
                                const KktTolerances& tol = {}) {
  lshape::detail::require_positive(V, "V");
  lshape::detail::require_positive(c.L1, "candidate L1");
  lshape::detail::require_positive(c.L2, "candidate L2");
  if (!(c.r1 > 0.0 && c.r2 > 0.0)) throw DomainError("candidate ratios must be positive");

  const double lo1 = r1_range.lo().value(), hi1 = r1_range.hi().value();
  const double lo2 = r2_range.lo().value(), hi2 = r2_range.hi().value();
  const double S = model::asym_envelope_at_volume(c.L1, c.L2, c.r1, c.r2, V);
  const auto grad = asym_envelope_gradient(c.L1, c.L2, c.r1, c.r2, V);

  KktReport rep;
  AsymMultipliers m;
  const bool ok1 =
      detail::recover_pair(detail::active_side(c.r1, lo1, hi1), grad[2], m.r1_lower, m.r1_upper);
  const bool ok2 =
      detail::recover_pair(detail::active_side(c.r2, lo2, hi2), grad[3], m.r2_lower, m.r2_upper);
  if (!ok1 || !ok2) rep.diagnostic = "both bounds of one ratio active: multiplier system is singular";
  rep.multipliers = {{"r1 lower", m.r1_lower},
                     {"r1 upper", m.r1_upper},
                     {"r2 lower", m.r2_lower},
                     {"r2 upper", m.r2_upper}};

  const auto gl = asym_lagrangian_gradient(c.L1, c.L2, c.r1, c.r2, V, m);
  const std::array<double, 4> x{c.L1, c.L2, c.r1, c.r2};
  for (std::size_t i = 0; i < 4; ++i) {
    rep.stationarity_residual = std::max(rep.stationarity_residual, std::abs(gl[i]) * x[i] / S);
  }
  const std::array<double, 4> g{lo1 - c.r1, c.r1 - hi1, lo2 - c.r2, c.r2 - hi2};
  const std::array<double, 4> lam{m.r1_lower, m.r1_upper, m.r2_lower, m.r2_upper};
  rep.primal_violation = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    rep.primal_violation = std::max(rep.primal_violation, g[i]);
    rep.slackness_residual = std::max(rep.slackness_residual, std::abs(lam[i] * g[i]) / S);
  }
  detail::finish(rep, tol);
  return rep;
}

// ---------------------------------------------------------------------------
// Scenario verification

struct SymFixedRatioInput {
  double volume;
  SymRatio ratio;
};

struct SymRatioIntervalInput {
  double volume;
  SymRatioInterval bounds;
};

struct AsymFixedRatiosInput {
  double volume;
  AsymRatios ratios;
};

struct AsymRatioBoxInput {
  double volume;
  AsymRatioInterval r1_range;
  AsymRatioInterval r2_range;
};

struct AsymFixedHeightInput {
  double volume;
  double height;
  AsymRatios ratios;
};

using ScenarioInput = std::variant<SymFixedRatioInput, SymRatioIntervalInput, AsymFixedRatiosInput,
                                   AsymRatioBoxInput, AsymFixedHeightInput>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline OptimizationResult closed_form(const ScenarioInput& in) {
  return std::visit(
      overloaded{
          [](const SymFixedRatioInput& s) { return optimize_sym_fixed_ratio(s.volume, s.ratio); },
          [](const SymRatioIntervalInput& s) {
            return optimize_sym_ratio_interval(s.volume, s.bounds);
          },
          [](const AsymFixedRatiosInput& s) {
            return optimize_asym_fixed_ratios(s.volume, s.ratios);
          },
          [](const AsymRatioBoxInput& s) {
            return optimize_asym_ratio_box(s.volume, s.r1_range, s.r2_range);
          },
          [](const AsymFixedHeightInput& s) {
            return optimize_asym_fixed_height(s.volume, s.height, s.ratios);
          },
      },
      in);
}

/// Free variables of a scenario, in the order the numerical search uses:
/// SymFixedRatio (B), SymRatioInterval (B, r), AsymFixedRatios (L1, L2),
/// AsymRatioBox (L1, L2, r1, r2), AsymFixedHeight (L1).
inline std::vector<double> free_variables(const OptimizationResult& res) {
  switch (res.scenario) {
  case Scenario::SymFixedRatio: return {res.sym().width()};
  case Scenario::SymRatioInterval: return {res.sym().width(), res.sym().ratio()};
  case Scenario::AsymFixedRatios: return {res.asym().L1(), res.asym().L2()};
  case Scenario::AsymRatioBox:
    return {res.asym().L1(), res.asym().L2(), res.asym().r1(), res.asym().r2()};
  case Scenario::AsymFixedHeight: return {res.asym().L1()};
  case Scenario::DegenerateCuboid: return {res.sym().length(), res.sym().height()};
  }
  return {};
}

struct NumericalOptimum {
  std::vector<double> point;
  double value;
};

/// Search settings for the numerical side of a scenario check.
struct SearchSettings {
  double golden_tol = 1e-12;
  int grid_levels_2d = 30;
  int grid_points_2d = 33;
  int grid_levels_4d = 40;
  int grid_points_4d = 13;
  double grid_shrink_4d = 2.0;
};

namespace detail {

/// Lengths are searched as log(L) over [0.02, 20] * cbrt(V), so the grid
/// resolution is relative and independent of the volume.
inline Interval log_length_box(double V) {
  const double s = std::log(std::cbrt(V));
  return {s + std::log(0.02), s + std::log(20.0)};
}

} // namespace detail

/// Minimizes the scenario's envelope model numerically, without any closed form.
inline NumericalOptimum numerical_optimum(const ScenarioInput& in, const SearchSettings& cfg = {}) {
  return std::visit(
      overloaded{
          [&](const SymFixedRatioInput& s) {
            const double V = s.volume, r = s.ratio.value();
            auto f = [=](double B) { return model::sym_envelope_parametric(B, r, V); };
            const Interval br = expand_bracket(f, std::cbrt(V), 1e-3 * std::cbrt(V));
            const auto m = golden_section_min(f, br.lo, br.hi, cfg.golden_tol);
            return NumericalOptimum{{m.argmin}, m.value};
          },
          [&](const SymRatioIntervalInput& s) {
            const double V = s.volume;
            auto f = [=](const std::array<double, 2>& x) {
              return model::sym_envelope_parametric(std::exp(x[0]), x[1], V);
            };
            const auto m = grid_refine_min<2>(
                f, {detail::log_length_box(V), Interval{s.bounds.lo().value(), s.bounds.hi().value()}},
                cfg.grid_levels_2d, cfg.grid_points_2d);
            return NumericalOptimum{{std::exp(m.argmin[0]), m.argmin[1]}, m.value};
          },
          [&](const AsymFixedRatiosInput& s) {
            const double V = s.volume, r1 = s.ratios.r1.value(), r2 = s.ratios.r2.value();
            auto f = [=](const std::array<double, 2>& x) {
              return model::asym_envelope_at_volume(std::exp(x[0]), std::exp(x[1]), r1, r2, V);
            };
            const auto box = detail::log_length_box(V);
            const auto m = grid_refine_min<2>(f, {box, box}, cfg.grid_levels_2d, cfg.grid_points_2d);
            return NumericalOptimum{{std::exp(m.argmin[0]), std::exp(m.argmin[1])}, m.value};
          },
          [&](const AsymRatioBoxInput& s) {
            const double V = s.volume;
            auto f = [=](const std::array<double, 4>& x) {
              return model::asym_envelope_at_volume(std::exp(x[0]), std::exp(x[1]), x[2], x[3], V);
            };
            const auto box = detail::log_length_box(V);
            const auto m = grid_refine_min<4>(
                f,
                {box, box, Interval{s.r1_range.lo().value(), s.r1_range.hi().value()},
                 Interval{s.r2_range.lo().value(), s.r2_range.hi().value()}},
                cfg.grid_levels_4d, cfg.grid_points_4d, cfg.grid_shrink_4d);
            return NumericalOptimum{
                {std::exp(m.argmin[0]), std::exp(m.argmin[1]), m.argmin[2], m.argmin[3]}, m.value};
          },
          [&](const AsymFixedHeightInput& s) {
            const double V = s.volume, H = s.height;
            const double k = model::fill_factor(s.ratios.r1.value(), s.ratios.r2.value());
            auto f = [=](double L1) { return fixed_height_envelope(L1, V, H, k); };
            const Interval br = expand_bracket(f, std::cbrt(V), 1e-3 * std::cbrt(V));
            const auto m = golden_section_min(f, br.lo, br.hi, cfg.golden_tol);
            return NumericalOptimum{{m.argmin}, m.value};
          },
      },
      in);
}

/// Symmetric search with r free in [1, r_max]: (B, r) at fixed volume.
inline NumericalOptimum free_ratio_search_sym(double V, double r_max = 10.0,
                                              const SearchSettings& cfg = {}) {
  lshape::detail::require_positive(V, "V");
  auto f = [=](const std::array<double, 2>& x) {
    return model::sym_envelope_parametric(std::exp(x[0]), x[1], V);
  };
  const auto m = grid_refine_min<2>(f, {detail::log_length_box(V), Interval{1.0, r_max}},
                                    cfg.grid_levels_2d, cfg.grid_points_2d);
  return {{std::exp(m.argmin[0]), m.argmin[1]}, m.value};
}

/// Asymmetric search with r1, r2 free in [r_min, 1]: (L1, L2, r1, r2) at fixed volume.
inline NumericalOptimum free_ratio_search_asym(double V, double r_min = 0.01,
                                               const SearchSettings& cfg = {}) {
  lshape::detail::require_positive(V, "V");
  auto f = [=](const std::array<double, 4>& x) {
    return model::asym_envelope_at_volume(std::exp(x[0]), std::exp(x[1]), x[2], x[3], V);
  };
  const auto box = detail::log_length_box(V);
  const auto m = grid_refine_min<4>(f, {box, box, Interval{r_min, 1.0}, Interval{r_min, 1.0}},
                                    cfg.grid_levels_4d, cfg.grid_points_4d, cfg.grid_shrink_4d);
  return {{std::exp(m.argmin[0]), std::exp(m.argmin[1]), m.argmin[2], m.argmin[3]}, m.value};
}

struct OracleTolerances {
  double objective = 1e-6;
  double point = 1e-5;
};

struct OracleComparison {
  OptimizationResult closed_form;
  NumericalOptimum numerical;
  double rel_error_point;
  double rel_error_objective;
  bool agrees;
};

inline OracleComparison compare(const OptimizationResult& claimed, const NumericalOptimum& found,
                                const OracleTolerances& tol = {}) {
  const auto point = free_variables(claimed);
  if (point.size() != found.point.size()) {
    throw DomainError("closed-form and numerical points have different dimensions");
  }
  double ep = 0.0;
  for (std::size_t i = 0; i < point.size(); ++i) {
    ep = std::max(ep, std::abs(point[i] - found.point[i]) / std::abs(point[i]));
  }
  const double eo = std::abs(claimed.envelope - found.value) / std::abs(claimed.envelope);
  return {claimed, found, ep, eo, ep <= tol.point && eo <= tol.objective};
}

inline OracleComparison verify_scenario(const ScenarioInput& in, const OracleTolerances& tol = {},
                                        const SearchSettings& cfg = {}) {
  return compare(closed_form(in), numerical_optimum(in, cfg), tol);
}

} // namespace lshape::oracle
