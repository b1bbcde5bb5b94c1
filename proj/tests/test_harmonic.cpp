#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "conelab/harmonic.hpp"
#include "fixtures.hpp"

using namespace conelab;
using fixtures::pt;

namespace {

struct Built {
  CramerData cramer;
  WhiteningData white;
  HarmonicTables tables;
};

Built build(const StepLaw& law, WhiteningMode mode = WhiteningMode::general, int window = 60) {
  Built b{solve_cramer_point(law), {}, {}};
  b.white = whiten(b.cramer.tilted, fixtures::quadrant(), mode);
  HarmonicOptions opt;
  opt.window = window;
  b.tables = build_harmonic_tables(fixtures::quadrant(), b.cramer, b.white, opt);
  return b;
}

}  // namespace

TEST(ContinuousHarmonic, WedgeFormula) {
  ContinuousHarmonic u;
  u.kind = ContinuousHarmonic::Kind::wedge2d;
  u.p = 2.0;
  u.theta1 = 0.0;
  // r^2 sin(2 theta) = 2 x y.
  EXPECT_NEAR(u_eval(u, (Vec(2) << 3.0, 2.0).finished()), 12.0, 1e-12);
  EXPECT_EQ(u_eval(u, Vec::Zero(2)), 0.0);
  EXPECT_NEAR(u_eval(u, (Vec(2) << 4.0, 0.0).finished()), 0.0, 1e-12);
  EXPECT_THROW(u_eval(u, (Vec(2) << -1.0, -1.0).finished()), DomainError);
}

TEST(ContinuousHarmonic, OrthantProduct) {
  ContinuousHarmonic u;
  u.kind = ContinuousHarmonic::Kind::orthant_product;
  u.p = 3;
  EXPECT_DOUBLE_EQ(u_eval(u, (Vec(3) << 1.0, 2.0, 3.0).finished()), 6.0);
  EXPECT_THROW(u_eval(u, (Vec(3) << 1.0, -2.0, 3.0).finished()), DomainError);
}

TEST(HarmonicTables, NearestNeighbourIsExactProduct) {
  // Tilted law is the simple walk and M = sqrt(2) I, so u(My) = r^2 sin(2 theta)
  // = 4 y1 y2, which is exactly harmonic for the killed simple walk.
  const auto b = build(fixtures::nn4());
  const auto& t = b.tables;
  EXPECT_TRUE(t.converged);
  for (int a = 1; a <= 30; a += 7)
    for (int c = 1; c <= 30; c += 5) {
      EXPECT_NEAR(t.V_at(pt(a, c)), 4.0 * a * c, 1e-9 * a * c);
      EXPECT_NEAR(t.Vprime_at(pt(a, c)), 4.0 * a * c, 1e-9 * a * c);
    }
  EXPECT_EQ(t.V_at(pt(0, 3)), 0.0);
}

TEST(HarmonicTables, KappaMatchesSeries) {
  // sum_{y >= 1} y r^y = r / (1 - r)^2 with r = exp(-h) = 1/sqrt(3).
  const auto b = build(fixtures::nn4());
  const double r = 1.0 / std::sqrt(3.0);
  const double s = r / ((1 - r) * (1 - r));
  EXPECT_NEAR(b.tables.kappa * 4.0 * s * s, 1.0, 1e-10);
  EXPECT_LT(b.tables.tail_bound, 1e-8 / b.tables.kappa);
}

TEST(HarmonicTables, UIsCHarmonic) {
  // The diagonal walk has a smaller |h|, so U' needs a wider window.
  for (auto [law, L] : {std::pair{fixtures::nn4(), 60}, std::pair{fixtures::diagonal(), 120}}) {
    const auto b = build(law, WhiteningMode::general, L);
    const auto& t = b.tables;
    for (int a = 1; a <= 12; ++a)
      for (int c = 1; c <= 12; ++c) {
        const IVec y = pt(a, c);
        if (t.V_at(y) == 0.0) continue;  // off the reachable coset
        EXPECT_LT(harmonic_residual(t.V, b.cramer.tilted, fixtures::quadrant(), y), 1e-4);
        EXPECT_LT(harmonic_residual(t.U, law, fixtures::quadrant(), y, b.cramer.c), 1e-4);
        EXPECT_LT(harmonic_residual(t.Uprime, law.negated(), fixtures::quadrant(), y, b.cramer.c), 1e-4);
      }
  }
}

TEST(HarmonicTables, DiagonalPositiveAndGrowing) {
  const auto b = build(fixtures::diagonal(), WhiteningMode::example2d, 120);
  const auto& t = b.tables;
  EXPECT_GT(t.V_at(pt(1, 1)), 0.0);
  EXPECT_GT(t.V_at(pt(4, 4)), t.V_at(pt(2, 2)));
  // Homogeneity: V(2y)/V(y) approaches 2^p.
  const double ratio = t.V_at(pt(20, 20)) / t.V_at(pt(10, 10));
  EXPECT_NEAR(std::log2(ratio), *b.white.p, 0.05);
}

TEST(HarmonicTables, SmallWindowRejected) {
  const auto cr = solve_cramer_point(fixtures::nn4());
  const auto w = whiten(cr.tilted, fixtures::quadrant());
  HarmonicOptions opt;
  opt.window = 6;
  try {
    build_harmonic_tables(fixtures::quadrant(), cr, w, opt);
    FAIL() << "expected WindowTooSmall";
  } catch (const WindowTooSmall& e) {
    EXPECT_GT(e.suggested_window, 6);
  }
}

TEST(HarmonicTables, HalfSpaceRejected) {
  const auto cr = solve_cramer_point(fixtures::nn4());
  const auto k = ConeSpec::halfspace(Vec::Ones(2));
  const auto w = whiten(cr.tilted, k);
  EXPECT_THROW(build_harmonic_tables(k, cr, w), ModelRejected);
}
