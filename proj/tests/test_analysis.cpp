#include <gtest/gtest.h>

#include <cmath>

#include "conelab/analysis.hpp"
#include "conelab/spectral.hpp"
#include "fixtures.hpp"

using namespace conelab;
using fixtures::pt;

TEST(FitTail, RecoversSyntheticExponents) {
  for (double s : {1.5, 2.0, 3.0}) {
    std::vector<double> b(401);
    for (int n = 0; n <= 400; ++n) b[n] = 3.7 * std::pow(std::max(n, 1), -s);
    const auto f = fit_tail(b, 1.0, FitMode::driftless, 50, 400);
    EXPECT_NEAR(f.exponent_hat, s, 1e-3);
    EXPECT_NEAR(f.constant_hat, 3.7, 1e-6);
  }
}

TEST(FitTail, SyntheticGeometricRate) {
  const double c = 0.8, s = 2.5;
  std::vector<double> b(401);
  for (int n = 0; n <= 400; ++n) b[n] = 2.0 * std::pow(std::max(n, 1), -s) * (1 + 0.3 / std::max(n, 1));
  const auto f = fit_tail(b, c, FitMode::drifted, 50, 400);
  EXPECT_NEAR(f.c_hat, c, 1e-6);
  EXPECT_NEAR(f.exponent_hat, s, 1e-2);
}

TEST(FitTail, Preconditions) {
  std::vector<double> b(100, 1.0);
  EXPECT_THROW(fit_tail(b, 1.0, FitMode::driftless, 50, 99), ConfigError);
  EXPECT_THROW(fit_tail(b, 1.0, FitMode::driftless, 10, 200), ConfigError);
}

TEST(FitTail, NearestNeighbourDrifted) {
  DpOptions opt;
  opt.rescale_by = fixtures::kC;
  const auto s = dp_evolve(fixtures::nn4(), fixtures::quadrant(), pt(1, 1), 400, opt);
  const auto f = fit_tail(s, FitMode::drifted, 50, 400);
  EXPECT_NEAR(f.c_hat, fixtures::kC, 0.002);
  EXPECT_NEAR(f.exponent_hat, 3.0, 0.15);
  EXPECT_NEAR(fitted_homogeneity_degree(f, 2), 2.0, 0.15);
  EXPECT_THROW(fit_tail(dp_evolve(fixtures::nn4(), fixtures::quadrant(), pt(1, 1), 400, {}), FitMode::drifted, 50,
                        400),
               ConfigError);
}

TEST(FitTail, TiltedWalkDriftless) {
  // Survival of the killed simple walk decays like n^{-p/2} = n^{-1}.
  DpOptions opt;
  opt.window = 120;
  const auto s = dp_evolve(fixtures::simple_walk(), fixtures::quadrant(), pt(1, 1), 400, opt);
  const auto f = fit_tail(s, FitMode::driftless, 50, 400);
  EXPECT_NEAR(f.exponent_hat, 1.0, 0.1);
  EXPECT_EQ(f.c_hat, 1.0);
}

TEST(FitTail, HalfSpaceReduction) {
  const auto r = halfspace_1d(fixtures::nn4(), (Vec(2) << 1.0, 0.0).finished(), 1, 400);
  const auto f = fit_tail(r.series, FitMode::drifted, 50, 400);
  EXPECT_NEAR(f.exponent_hat, 1.5, 0.1);
  EXPECT_NEAR(f.c_hat, std::sqrt(3.0) / 4 + 0.5, 0.002);
}

TEST(Report, PassIffWithinTolerance) {
  EXPECT_TRUE(make_report("x", 1, 1, 0.02, 0.02).pass);
  EXPECT_FALSE(make_report("x", 1, 1, 0.0201, 0.02).pass);
}

class Selectors : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    law = new StepLaw(fixtures::nn4());
    cramer = new CramerData(solve_cramer_point(*law));
    const auto w = whiten(cramer->tilted, fixtures::quadrant());
    tables = new HarmonicTables(build_harmonic_tables(fixtures::quadrant(), *cramer, w));
    DpOptions opt;
    opt.rescale_by = cramer->c;
    opt.retain = {75, 100, 150, 299, 300};
    sx = new DpSeries(dp_evolve(*law, fixtures::quadrant(), pt(1, 1), 400, opt));
    opt.retain = {150, 200};
    sy = new DpSeries(dp_evolve(*law, fixtures::quadrant(), pt(2, 2), 400, opt));
  }
  static void TearDownTestSuite() {
    delete law;
    delete cramer;
    delete tables;
    delete sx;
    delete sy;
  }
  static StepLaw* law;
  static CramerData* cramer;
  static HarmonicTables* tables;
  static DpSeries *sx, *sy;
};

StepLaw* Selectors::law = nullptr;
CramerData* Selectors::cramer = nullptr;
HarmonicTables* Selectors::tables = nullptr;
DpSeries* Selectors::sx = nullptr;
DpSeries* Selectors::sy = nullptr;

TEST_F(Selectors, Hazard) {
  const auto r = verify_hazard(*sx, cramer->c, 300);
  EXPECT_NEAR(r.predicted, 2 / std::sqrt(3.0) - 1, 1e-12);
  EXPECT_TRUE(r.pass) << r.deviation;
}

TEST_F(Selectors, CorRatio) {
  const auto r = verify_cor_ratio(*sx, *sy, *tables, 300);
  EXPECT_NEAR(r.predicted, 1.0 / 12, 1e-9);  // e^{-2h} (1*1)/(2*2)
  EXPECT_TRUE(r.pass) << r.deviation;
}

TEST_F(Selectors, TailAsymptoticsSelector) {
  const auto r = verify_theorem1(*sx, *sy, *tables, 2.0, 2, 50, 400);
  EXPECT_TRUE(r.pass) << r.deviation;
}

TEST_F(Selectors, Bridge) {
  const auto r = verify_bridge(*sx, *sy, pt(2, 2), 300, 2.0, 2);
  EXPECT_NEAR(r.predicted, std::pow(8.0 / 9, -3), 1e-12);
  EXPECT_TRUE(r.pass) << r.deviation;
}

TEST_F(Selectors, ExpMoment) {
  const auto r = verify_expmoment(*sx, cramer->c, 50, 400);
  EXPECT_TRUE(r.pass) << r.deviation;
  EXPECT_LT(r.measured, 1.0);
}

TEST_F(Selectors, YaglomDistanceShrinks) {
  const auto r = verify_yaglom(*sx, *law, tables->Uprime, 300);
  EXPECT_EQ(r.check_name, "yaglom");
  EXPECT_EQ(r.pass, r.deviation <= r.tolerance);
  EXPECT_LT(r.measured, 0.05);
}

TEST_F(Selectors, ShapeChecksIgnoreScale) {
  HarmonicTables scaled = *tables;
  for (auto& v : scaled.U.values) v *= 17.0;
  for (auto& v : scaled.Uprime.values) v *= 0.03;
  EXPECT_NEAR(verify_exit(*sx, *law, fixtures::quadrant(), scaled, 300).measured,
              verify_exit(*sx, *law, fixtures::quadrant(), *tables, 300).measured, 1e-12);
  EXPECT_NEAR(verify_yaglom(*sx, *law, scaled.Uprime, 300).measured,
              verify_yaglom(*sx, *law, tables->Uprime, 300).measured, 1e-12);
  EXPECT_NEAR(verify_theorem1(*sx, *sy, scaled, 2.0, 2, 50, 400).deviation,
              verify_theorem1(*sx, *sy, *tables, 2.0, 2, 50, 400).deviation, 1e-12);
}

TEST_F(Selectors, Reproducible) {
  const auto a = verify_exit(*sx, *law, fixtures::quadrant(), *tables, 300);
  const auto b = verify_exit(*sx, *law, fixtures::quadrant(), *tables, 300);
  EXPECT_EQ(a.measured, b.measured);
}

TEST(DriftlessBound, FlatStatistic) {
  DpOptions opt;
  opt.window = 120;
  std::vector<DpSeries> series;
  std::vector<double> norms;
  for (int a = 1; a <= 5; ++a)
    for (int b = 1; b <= 4; ++b) {
      series.push_back(dp_evolve(fixtures::simple_walk(), fixtures::quadrant(), pt(a, b), 400, opt));
      norms.push_back(std::sqrt(2.0 * (a * a + b * b)));
    }
  const auto r = verify_driftless_bound(series, norms, 2.0, 50, 400);
  EXPECT_TRUE(r.pass) << r.measured;
}

TEST(NormalizedTvMap, Disjoint) {
  std::map<std::vector<int>, double> a{{{0, 1}, 2.0}}, b{{{1, 0}, 5.0}};
  EXPECT_DOUBLE_EQ(normalized_tv(a, b), 1.0);
  EXPECT_DOUBLE_EQ(normalized_tv(a, a), 0.0);
}
