#include <gtest/gtest.h>

#include <cmath>

#include "conelab/dp_oracle.hpp"
#include "conelab/simulate.hpp"
#include "fixtures.hpp"

using namespace conelab;
using fixtures::pt;

namespace {

McOptions opts(std::int64_t n, std::uint64_t seed = 7, int workers = 1) { return {n, seed, workers}; }

double dp_survival(const StepLaw& law, const IVec& x0, int n) {
  return std::exp(dp_evolve(law, fixtures::quadrant(), x0, n, {}).log_raw_survival(n));
}

}  // namespace

TEST(StreamRng, StreamsDiffer) {
  StreamRng a(1, 0), b(1, 1), c(1, 0);
  const auto va = a.next();
  EXPECT_NE(va, b.next());
  EXPECT_EQ(va, c.next());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(StepSampler, Frequencies) {
  const auto law = fixtures::nn4();
  const StepSampler s(law);
  StreamRng rng(3, 0);
  std::vector<int> count(law.size(), 0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++count[s.sample(rng)];
  for (std::size_t j = 0; j < law.size(); ++j) {
    const double p = law.prob(j);
    EXPECT_NEAR(count[j] / double(n), p, 4 * std::sqrt(p * (1 - p) / n));
  }
}

TEST(McSurvival, ZeroStepsExact) {
  const auto e = mc_survival(fixtures::nn4(), fixtures::quadrant(), pt(1, 1), 0, opts(10));
  EXPECT_EQ(e.value, 1.0);
  EXPECT_EQ(e.std_error, 0.0);
  const auto cr = solve_cramer_point(fixtures::nn4());
  EXPECT_EQ(is_survival(cr, fixtures::quadrant(), pt(1, 1), 0, opts(10)).value, 1.0);
}

TEST(McSurvival, FirstStepsWithinThreeSigma) {
  const auto law = fixtures::nn4();
  const auto e1 = mc_survival(law, fixtures::quadrant(), pt(1, 1), 1, opts(1'000'000));
  EXPECT_NEAR(e1.value, 0.25, 3 * e1.std_error);
  const auto e2 = mc_survival(law, fixtures::quadrant(), pt(1, 1), 2, opts(1'000'000));
  EXPECT_NEAR(e2.value, 5.0 / 32, 3 * e2.std_error);
  EXPECT_NEAR(e1.std_error, std::sqrt(0.25 * 0.75 / 1e6), 1e-5);
}

TEST(IsSurvival, FirstStepMatchesHandValue) {
  // c (e^{-h1} + e^{-h2}) / 4 = 1/4.
  const auto cr = solve_cramer_point(fixtures::nn4());
  const auto e = is_survival(cr, fixtures::quadrant(), pt(1, 1), 1, opts(200000));
  EXPECT_NEAR(e.value, 0.25, 3 * e.std_error + 1e-15);
}

TEST(Estimators, Reproducible) {
  const auto law = fixtures::lazy_nn4();
  for (int w : {1, 3}) {
    const auto a = mc_survival(law, fixtures::quadrant(), pt(2, 2), 10, opts(50000, 11, w));
    const auto b = mc_survival(law, fixtures::quadrant(), pt(2, 2), 10, opts(50000, 11, w));
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.std_error, b.std_error);
    EXPECT_EQ(a.workers, w);
  }
  const auto cr = solve_cramer_point(law);
  const auto a = is_survival(cr, fixtures::quadrant(), pt(2, 2), 10, opts(50000, 11, 2));
  const auto b = is_survival(cr, fixtures::quadrant(), pt(2, 2), 10, opts(50000, 11, 2));
  EXPECT_EQ(a.value, b.value);
}

TEST(Estimators, UnbiasedAgainstDp) {
  const auto law = fixtures::lazy_nn4();
  const auto cr = solve_cramer_point(law);
  const IVec x0 = pt(2, 1);
  for (int n : {5, 12, 20}) {
    const double exact = dp_survival(law, x0, n);
    int bad_direct = 0, bad_is = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto d = mc_survival(law, fixtures::quadrant(), x0, n, opts(20000, seed));
      const auto i = is_survival(cr, fixtures::quadrant(), x0, n, opts(20000, seed));
      bad_direct += std::abs(d.value - exact) > 4 * d.std_error;
      bad_is += std::abs(i.value - exact) > 4 * i.std_error;
    }
    EXPECT_EQ(bad_direct, 0) << "n = " << n;
    EXPECT_EQ(bad_is, 0) << "n = " << n;
  }
}

TEST(IsSurvival, LogSpaceForLongHorizons) {
  const auto cr = solve_cramer_point(fixtures::nn4());
  const auto e = is_survival(cr, fixtures::quadrant(), pt(1, 1), 400, opts(20000));
  const double exact = dp_evolve(fixtures::nn4(), fixtures::quadrant(), pt(1, 1), 400,
                                 {60, cr.c, {}, false, 1e-12})
                           .log_raw_survival(400);
  EXPECT_TRUE(std::isfinite(e.log_value));
  EXPECT_NEAR(e.log_value, exact, 0.3);
}

class ZChainTest : public ::testing::Test {
 protected:
  void SetUp() override {
    cramer = solve_cramer_point(law);
    const auto w = whiten(cramer.tilted, fixtures::quadrant());
    HarmonicOptions opt;
    opt.window = 100;
    tables = build_harmonic_tables(fixtures::quadrant(), cramer, w, opt);
  }
  StepLaw law = fixtures::nn4();
  CramerData cramer;
  HarmonicTables tables;
};

TEST_F(ZChainTest, RowSumsAndSupport) {
  const auto p = z_chain(law, fixtures::quadrant(), tables, pt(1, 1), 200, 5);
  ASSERT_FALSE(p.truncated);
  EXPECT_EQ(p.positions.size(), 201u);
  for (double r : p.row_sums) EXPECT_NEAR(r, 1.0, 1e-4);
  for (const auto& y : p.positions) EXPECT_TRUE(fixtures::quadrant().contains(y));
}

TEST_F(ZChainTest, Transient) {
  const auto z = z_chain_ensemble(law, fixtures::quadrant(), tables, pt(1, 1), 200, 1000, 9);
  EXPECT_EQ(z.truncated, 0);
  const double gap = z.mean_norm[200] - z.mean_norm[20];
  EXPECT_GT(gap, 3 * std::hypot(z.se_norm[200], z.se_norm[20]));
}

TEST_F(ZChainTest, Reproducible) {
  const auto a = z_chain(law, fixtures::quadrant(), tables, pt(1, 1), 50, 5, 2);
  const auto b = z_chain(law, fixtures::quadrant(), tables, pt(1, 1), 50, 5, 2);
  EXPECT_EQ(a.positions, b.positions);
}

TEST_F(ZChainTest, TruncationReported) {
  HarmonicOptions opt;
  opt.window = 60;
  const auto w = whiten(cramer.tilted, fixtures::quadrant());
  const auto small = build_harmonic_tables(fixtures::quadrant(), cramer, w, opt);
  const auto p = z_chain(law, fixtures::quadrant(), small, pt(1, 1), 20000, 5);
  EXPECT_TRUE(p.truncated);
  EXPECT_FALSE(p.notice.empty());
}

TEST_F(ZChainTest, StartOutsideWindow) {
  EXPECT_THROW(z_chain(law, fixtures::quadrant(), tables, pt(500, 1), 5, 1), ConfigError);
}
