#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "conelab/cramer.hpp"
#include "conelab/whiten.hpp"
#include "fixtures.hpp"

using namespace conelab;

namespace {

void expect_whitens(const Mat& cov, WhiteningMode mode) {
  const Mat M = whitening_matrix(cov, mode);
  EXPECT_LT((M * cov * M.transpose() - Mat::Identity(cov.rows(), cov.cols())).cwiseAbs().maxCoeff(), 1e-10);
}

// Correlation of the tilted diagonal walk by hand: the tilted weights of
// (1,1), (-1,-1) are sqrt(3)/8 / c each and of (1,-1), (-1,1) are 1/4 / c.
double diagonal_alpha() { return (std::sqrt(3.0) - 2) / (std::sqrt(3.0) + 2); }

}  // namespace

TEST(Whiten, NearestNeighbourBothModes) {
  const auto cr = solve_cramer_point(fixtures::nn4());
  const Mat cov = tilted_covariance(cr.tilted);
  expect_whitens(cov, WhiteningMode::general);
  expect_whitens(cov, WhiteningMode::example2d);
  EXPECT_NEAR(correlation_2d(cov), 0.0, 1e-12);
  for (auto mode : {WhiteningMode::general, WhiteningMode::example2d}) {
    const auto w = whiten(cr.tilted, fixtures::quadrant(), mode);
    ASSERT_TRUE(w.p.has_value());
    EXPECT_NEAR(*w.p, 2.0, 1e-9);
  }
}

TEST(Whiten, DiagonalWalkOpening) {
  const auto cr = solve_cramer_point(fixtures::diagonal());
  const Mat cov = tilted_covariance(cr.tilted);
  expect_whitens(cov, WhiteningMode::general);
  expect_whitens(cov, WhiteningMode::example2d);
  EXPECT_NEAR(correlation_2d(cov), diagonal_alpha(), 1e-12);
  const auto g = whiten(cr.tilted, fixtures::quadrant(), WhiteningMode::general);
  const auto e = whiten(cr.tilted, fixtures::quadrant(), WhiteningMode::example2d);
  EXPECT_NEAR(g.cone_image.opening, e.cone_image.opening, 1e-9);
  const double p = std::numbers::pi / std::acos(-diagonal_alpha());
  EXPECT_NEAR(*g.p, p, 1e-9);
  EXPECT_NEAR(*e.p, p, 1e-9);
  EXPECT_NEAR(p, 2.0959, 1e-4);
}

TEST(Whiten, RandomCovariances) {
  for (double a : {-0.8, -0.3, 0.1, 0.6}) {
    const Mat cov = (Mat(2, 2) << 2.0, a * std::sqrt(2.0 * 0.7), a * std::sqrt(2.0 * 0.7), 0.7).finished();
    expect_whitens(cov, WhiteningMode::general);
    expect_whitens(cov, WhiteningMode::example2d);
  }
}

TEST(Whiten, HalfSpaceDegreeOne) {
  const auto cr = solve_cramer_point(fixtures::nn4());
  const auto w = whiten(cr.tilted, ConeSpec::halfspace(Vec::Ones(2)));
  ASSERT_TRUE(w.p.has_value());
  EXPECT_DOUBLE_EQ(*w.p, 1.0);
}

TEST(Whiten, NonDiagonalOrthantNeedsFit) {
  // A 3D law with correlated tilted coordinates.
  using conelab::IVec;
  auto v = [](int a, int b, int c) { return (IVec(3) << a, b, c).finished(); };
  const StepLaw law({v(1, 1, 0), v(-1, -1, 0), v(1, 0, 0), v(-1, 0, 0), v(0, 0, 1), v(0, 0, -1), v(0, 1, 0),
                     v(0, -1, 0)},
                    {0.1, 0.2, 0.05, 0.15, 0.1, 0.2, 0.05, 0.15});
  const auto cr = solve_cramer_point(law);
  EXPECT_THROW(whiten(cr.tilted, ConeSpec::orthant(3)), ConfigError);
  const auto w = whiten(cr.tilted, ConeSpec::orthant(3), WhiteningMode::general, true);
  EXPECT_FALSE(w.p.has_value());
}

TEST(Whiten, RejectsDriftedLaw) { EXPECT_THROW(tilted_covariance(fixtures::nn4()), NumericalError); }
