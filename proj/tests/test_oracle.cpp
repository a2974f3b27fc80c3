#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lshape/oracle.hpp"

using namespace lshape;
using namespace lshape::oracle;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST(GoldenSection, Examples) {
  auto f = [](double B) { return model::sym_envelope_parametric(B, 2.0, 300.0); };
  const auto m = golden_section_min(f, 0.1, 50.0, 1e-10);
  EXPECT_NEAR(m.argmin, 5.1087, 1e-4);
  EXPECT_NEAR(m.value, 234.8920585, 1e-6);

  const auto q = golden_section_min([](double x) { return (x - 3) * (x - 3); }, 0.0, 10.0, 1e-10);
  EXPECT_NEAR(q.argmin, 3.0, 1e-7);
  EXPECT_NEAR(q.value, 0.0, 1e-14);

  auto g = [](double B) { return model::sym_envelope_parametric(B, 2.0, 4.0); };
  EXPECT_NEAR(golden_section_min(g, 0.1, 50.0, 1e-10).argmin, 1.2114, 1e-4);
}

TEST(GoldenSection, Errors) {
  EXPECT_THROW(golden_section_min([](double x) { return x; }, 2.0, 1.0, 1e-6), DomainError);
  try {
    golden_section_min([](double x) { return x > 5 ? std::nan("") : x * x; }, 0.0, 10.0, 1e-6);
    FAIL();
  } catch (const EvaluationError& e) {
    EXPECT_GT(e.point(), 5.0);
  }
  const ScalarObjective obj{[](double x) { return 1.0 / x + x; }, {0.0, 100.0}};
  EXPECT_THROW(golden_section_min(obj, -1.0, 5.0, 1e-6), DomainError);
  EXPECT_NEAR(golden_section_min(obj, 0.01, 5.0, 1e-10).argmin, 1.0, 1e-6);
}

TEST(GridRefine, Examples) {
  auto f = [](const std::array<double, 2>& x) {
    return model::asym_envelope_at_volume(x[0], x[1], 0.4, 0.6, 300.0);
  };
  const auto m = grid_refine_min<2>(f, {Interval{1, 40}, Interval{1, 40}}, 8);
  EXPECT_NEAR(m.argmin[0], 10.127, 0.01);
  EXPECT_NEAR(m.argmin[1], 10.127, 0.01);
  EXPECT_NEAR(m.value, 233.86, 0.005);

  const auto z = grid_refine_min<2>(
      [](const std::array<double, 2>& x) { return x[0] * x[0] + x[1] * x[1]; },
      {Interval{-1, 1}, Interval{-1, 1}}, 5);
  EXPECT_DOUBLE_EQ(z.argmin[0], 0.0);
  EXPECT_DOUBLE_EQ(z.value, 0.0);

  const auto c = grid_refine_min<2>(
      [](const std::array<double, 2>& x) { return model::sym_envelope_parametric(x[0], x[1], 200.0); },
      {Interval{0.5, 20}, Interval{3, 4}}, 20);
  EXPECT_DOUBLE_EQ(c.argmin[1], 3.0);
  EXPECT_NEAR(c.argmin[0], 3.634, 1e-3);
}

TEST(GridRefine, Errors) {
  auto f = [](const std::array<double, 1>& x) { return x[0]; };
  EXPECT_THROW(grid_refine_min<1>(f, {Interval{1, 0}}, 3), DomainError);
  EXPECT_THROW(grid_refine_min<1>(f, {Interval{0, 1}}, 0), DomainError);
  EXPECT_THROW(grid_refine_min<1>([](const std::array<double, 1>& x) { return 1.0 / x[0]; },
                                  {Interval{0, 1}}, 2),
               EvaluationError);
}

TEST(Kkt, SymExamples) {
  const SymRatioInterval b(3, 4);
  const auto opt = optimize_sym_ratio_interval(200, b);
  const auto rep = kkt_check_sym(200, b, {opt.sym().width(), opt.sym().ratio()});
  EXPECT_TRUE(rep.passed) << rep.diagnostic;
  ASSERT_EQ(rep.multipliers.size(), 2u);
  EXPECT_GT(rep.multipliers[0].value, 0.0);
  EXPECT_EQ(rep.multipliers[1].value, 0.0);

  const auto bad = kkt_check_sym(200, b, {5.0, 3.5});
  EXPECT_FALSE(bad.passed);
  EXPECT_GT(bad.stationarity_residual, 1e-3);

  const SymRatioInterval b2(2, 5);
  const auto o2 = optimize_sym_ratio_interval(300, b2);
  EXPECT_TRUE(kkt_check_sym(300, b2, {o2.sym().width(), o2.sym().ratio()}).passed);

  // The upper bound is never optimal: its recovered multiplier is negative.
  const auto up = optimize_sym_fixed_ratio(200, SymRatio(4));
  const auto rep_up = kkt_check_sym(200, b, {up.sym().width(), 4.0});
  EXPECT_FALSE(rep_up.passed);
  EXPECT_LT(rep_up.dual_violation, 0.0);

  EXPECT_THROW(kkt_check_sym(200, b, {-1.0, 3.0}), DomainError);
}

TEST(Kkt, AsymExamples) {
  const AsymRatioInterval b1(0.3, 0.5), b2(0.2, 0.8);
  const auto opt = optimize_asym_ratio_box(200, b1, b2);
  const auto& d = opt.asym();
  const auto rep = kkt_check_asym(200, b1, b2, {d.L1(), d.L2(), d.r1(), d.r2()});
  EXPECT_TRUE(rep.passed) << rep.diagnostic;
  EXPECT_GT(rep.multipliers[1].value, 0.0);
  EXPECT_GT(rep.multipliers[3].value, 0.0);
  EXPECT_EQ(rep.multipliers[0].value, 0.0);
  EXPECT_EQ(rep.multipliers[2].value, 0.0);

  const auto bad = kkt_check_asym(200, b1, b2, {1.1 * d.L1(), d.L2(), d.r1(), d.r2()});
  EXPECT_FALSE(bad.passed);
  EXPECT_GT(bad.stationarity_residual, 1e-3);

  const AsymRatioInterval c(0.2, 0.6);
  const auto o2 = optimize_asym_ratio_box(100, c, c);
  EXPECT_TRUE(kkt_check_asym(100, c, c, {o2.asym().L1(), o2.asym().L2(), 0.6, 0.6}).passed);

  // Infeasible candidate outside the box.
  const auto out = kkt_check_asym(200, b1, b2, {d.L1(), d.L2(), 0.55, 0.8});
  EXPECT_FALSE(out.passed);
  EXPECT_GT(out.primal_violation, 0.0);
}

TEST(VerifyScenario, Examples) {
  EXPECT_TRUE(verify_scenario(SymFixedRatioInput{300, SymRatio(2)}).agrees);
  const auto h = verify_scenario(AsymFixedHeightInput{3, 1, AsymRatios(0.5, 0.5)});
  EXPECT_TRUE(h.agrees);
  EXPECT_NEAR(h.numerical.value, 11.0, 1e-9);
  const auto box = verify_scenario(
      AsymRatioBoxInput{200, AsymRatioInterval(0.3, 0.5), AsymRatioInterval(0.2, 0.8)});
  EXPECT_TRUE(box.agrees);
  EXPECT_NEAR(box.numerical.value, 168.69, 0.005);
  EXPECT_TRUE(verify_scenario(SymRatioIntervalInput{200, SymRatioInterval(3, 4)}).agrees);
  EXPECT_TRUE(verify_scenario(AsymFixedRatiosInput{300, AsymRatios(0.4, 0.6)}).agrees);
}

TEST(VerifyScenario, AgreesIffBothErrorsWithinTolerance) {
  const auto claimed = optimize_sym_fixed_ratio(300, SymRatio(2));
  const double B = claimed.sym().width();
  const OracleTolerances tol;
  EXPECT_TRUE(compare(claimed, {{B}, claimed.envelope}, tol).agrees);
  EXPECT_FALSE(compare(claimed, {{B * (1 + 2e-5)}, claimed.envelope}, tol).agrees);
  EXPECT_FALSE(compare(claimed, {{B}, claimed.envelope * (1 + 2e-6)}, tol).agrees);
  EXPECT_THROW(compare(claimed, {{B, 1.0}, claimed.envelope}, tol), DomainError);
}

TEST(Gradients, MatchCentralDifferences) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uv(10, 5000), ub(0.3, 3.0), ur(1.05, 10), ua(0.05, 0.95),
      ul(0.3, 3.0), um(0.0, 5.0);
  auto fd_ok = [](double analytic, double numeric, double scale) {
    return std::abs(analytic - numeric) <= 1e-5 * std::max(std::abs(numeric), scale);
  };
  for (int i = 0; i < 100; ++i) {
    const double V = uv(rng), s = std::cbrt(V);
    const double B = ub(rng) * s, r = ur(rng);
    const SymRatioInterval bounds(1.01, 10.5);
    const SymMultipliers m{um(rng), um(rng)};
    const auto g = sym_lagrangian_gradient(B, r, V, m);
    const double hB = 1e-6 * B, hr = 1e-6 * r;
    const double nB = (sym_lagrangian(B + hB, r, V, bounds, m) - sym_lagrangian(B - hB, r, V, bounds, m)) / (2 * hB);
    const double nr = (sym_lagrangian(B, r + hr, V, bounds, m) - sym_lagrangian(B, r - hr, V, bounds, m)) / (2 * hr);
    const double S = model::sym_envelope_parametric(B, r, V);
    EXPECT_TRUE(fd_ok(g.dB, nB, S / B)) << g.dB << " vs " << nB;
    EXPECT_TRUE(fd_ok(g.dr, nr, S / r)) << g.dr << " vs " << nr;

    const AsymRatioInterval b1(0.01, 0.99), b2(0.01, 0.99);
    const AsymMultipliers am{um(rng), um(rng), um(rng), um(rng)};
    std::array<double, 4> x{ul(rng) * s, ul(rng) * s, ua(rng), ua(rng)};
    const auto ga = asym_lagrangian_gradient(x[0], x[1], x[2], x[3], V, am);
    const double Sa = model::asym_envelope_at_volume(x[0], x[1], x[2], x[3], V);
    for (std::size_t j = 0; j < 4; ++j) {
      auto xp = x, xm = x;
      const double h = 1e-6 * x[j];
      xp[j] += h;
      xm[j] -= h;
      const double n = (asym_lagrangian(xp[0], xp[1], xp[2], xp[3], V, b1, b2, am) -
                        asym_lagrangian(xm[0], xm[1], xm[2], xm[3], V, b1, b2, am)) /
                       (2 * h);
      EXPECT_TRUE(fd_ok(ga[j], n, Sa / x[j])) << j << ": " << ga[j] << " vs " << n;
    }

    const double H = ub(rng) * s, k = model::fill_factor(x[2], x[3]), L = x[0], h = 1e-6 * L;
    const double n = (fixed_height_envelope(L + h, V, H, k) - fixed_height_envelope(L - h, V, H, k)) / (2 * h);
    EXPECT_TRUE(fd_ok(fixed_height_envelope_derivative(L, V, H, k), n, V / (H * L)));
  }
}

TEST(Determinism, BitIdenticalOutputs) {
  const ScenarioInput ins[] = {
      SymFixedRatioInput{123.4, SymRatio(2.7)},
      SymRatioIntervalInput{77, SymRatioInterval(1.5, 2.5)},
      AsymFixedRatiosInput{999, AsymRatios(0.3, 0.7)},
      AsymRatioBoxInput{450, AsymRatioInterval(0.1, 0.4), AsymRatioInterval(0.5, 0.6)},
      AsymFixedHeightInput{321, 5.5, AsymRatios(0.6, 0.2)},
  };
  for (const auto& in : ins) {
    const auto a = numerical_optimum(in);
    const auto b = numerical_optimum(in);
    EXPECT_EQ(a.point, b.point);
    EXPECT_EQ(a.value, b.value);
  }
}

TEST(Degeneracy, FreeRatioCollapsesToCuboid) {
  for (double V : {50.0, 300.0, 2000.0}) {
    const auto cube = detect_degenerate_cuboid(V);
    const auto ms = free_ratio_search_sym(V);
    EXPECT_LE(ms.point[1] - 1.0, 1e-6);
    EXPECT_LE(rel(ms.point[0], cube.sym().width()), 1e-5);
    EXPECT_LE(rel(ms.value, cube.envelope), 1e-8);

    const auto ma = free_ratio_search_asym(V);
    EXPECT_GE(model::fill_factor(ma.point[2], ma.point[3]), 1.0 - 1e-6);
    EXPECT_LE(rel(ma.value, cube.envelope), 1e-8);
  }
}

TEST(Convexity, MidpointBelowChordAlongB) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> uv(10, 5000), ur(1.01, 10), ub(0.01, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double V = uv(rng), r = ur(rng), s = std::cbrt(V);
    const double a = ub(rng) * s, b = ub(rng) * s;
    const double fa = model::sym_envelope_parametric(a, r, V);
    const double fb = model::sym_envelope_parametric(b, r, V);
    const double fm = model::sym_envelope_parametric(0.5 * (a + b), r, V);
    EXPECT_LE(fm, 0.5 * (fa + fb) + 1e-9 * std::max(1.0, 0.5 * (fa + fb)));
  }
}

TEST(FixedFloorAndHeight, EqualWingsRecoverTheSymmetricPlan) {
  // A symmetric plan entered with equal wings: fixing its height and fill
  // factor, the fixed-height optimum returns the same wing length.
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> ub(1, 5), uf(1.5, 4), uh(2, 6);
  for (int i = 0; i < 200; ++i) {
    const double B = ub(rng), L = uf(rng) * B, H = uh(rng);
    const double F = 2 * L * B - B * B;
    const double k = F / (L * L);
    const double V = F * H;
    const auto m = golden_section_min([&](double L1) { return fixed_height_envelope(L1, V, H, k); },
                                      0.1 * L, 10 * L, 1e-12);
    EXPECT_LE(rel(m.argmin, L), 1e-6);
    EXPECT_LE(rel(optimize_asym_fixed_height(V, H, AsymRatios(B / L, B / L)).asym().L1(), L), 1e-12);
  }
}
