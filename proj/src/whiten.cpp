#include "conelab/whiten.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace conelab {

namespace {

constexpr double kSymmetryTol = 1e-12;

void require_symmetric_pd(const Mat& cov) {
  if (cov.rows() != cov.cols() || cov.rows() == 0) throw ConfigError("covariance must be square");
  const double scale = cov.cwiseAbs().maxCoeff();
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * std::max(1.0, scale))
    throw NumericalError("covariance is not symmetric");
  const Eigen::LLT<Mat> llt(cov);
  if (llt.info() != Eigen::Success) throw NumericalError("covariance is not positive definite (collinear walk)");
}

double ccw_angle(const Vec& from, const Vec& to) {
  double a = std::atan2(to[1], to[0]) - std::atan2(from[1], from[0]);
  if (a <= 0) a += 2 * std::numbers::pi;
  return a;
}

}  // namespace

Mat tilted_covariance(const StepLaw& tilted) {
  if (tilted.mean().norm() > 1e-10) throw NumericalError("tilted_covariance: law is not driftless");
  Mat cov = tilted.second_moment();
  cov = 0.5 * (cov + cov.transpose());
  require_symmetric_pd(cov);
  return cov;
}

double correlation_2d(const Mat& cov) {
  if (cov.rows() != 2) throw ConfigError("correlation_2d: d must be 2");
  return cov(0, 1) / std::sqrt(cov(0, 0) * cov(1, 1));
}

Mat whitening_matrix(const Mat& cov, WhiteningMode mode) {
  require_symmetric_pd(cov);
  const Eigen::Index d = cov.rows();

  if (mode == WhiteningMode::example2d) {
    if (d != 2) throw ConfigError("example2d whitening requires d = 2");
    const double c1 = cov(0, 0), c2 = cov(1, 1);
    const double alpha = correlation_2d(cov);
    const double phi = 0.5 * std::asin(alpha);
    const double s = 1.0 / std::sqrt(1.0 - alpha * alpha);
    Mat M(2, 2);
    M << std::cos(phi) / std::sqrt(c1), -std::sin(phi) / std::sqrt(c2),
        -std::sin(phi) / std::sqrt(c1), std::cos(phi) / std::sqrt(c2);
    return s * M;
  }

  if (d == 2) {
    // Closed-form eigendecomposition of a symmetric 2x2 matrix.
    const double a = cov(0, 0), b = cov(0, 1), c = cov(1, 1);
    const double mid = 0.5 * (a + c);
    const double rad = std::hypot(0.5 * (a - c), b);
    const double l1 = mid + rad, l2 = mid - rad;
    Vec v1(2);
    if (rad == 0.0) {
      v1 << 1.0, 0.0;
    } else if (a >= c) {
      v1 << l1 - c, b;
    } else {
      v1 << b, l1 - a;
    }
    v1.normalize();
    Vec v2(2);
    v2 << -v1[1], v1[0];
    return v1 * v1.transpose() / std::sqrt(l1) + v2 * v2.transpose() / std::sqrt(l2);
  }

  const Eigen::SelfAdjointEigenSolver<Mat> es(cov);
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

ConeImageResult cone_image_and_p(const ConeSpec& cone, const Mat& M, bool allow_fit) {
  if (M.rows() != cone.dim() || M.cols() != cone.dim()) throw ConfigError("cone_image_and_p: dimension mismatch");
  ConeImageResult out;
  out.image.dim = cone.dim();

  if (const auto* hs = std::get_if<HalfSpace>(&cone.variant())) {
    // {a.x > 0} maps to {(M^{-T} a).y > 0}.
    out.image.kind = ConeImage::Kind::halfspace;
    out.image.normal = M.transpose().fullPivLu().solve(hs->normal);
    out.p = 1.0;
    return out;
  }

  if (cone.dim() == 2) {
    double theta0 = 0.0, beta = std::numbers::pi / 2;
    if (const auto* w = std::get_if<Wedge2d>(&cone.variant())) {
      theta0 = w->rotation;
      beta = w->opening;
    }
    Vec r1(2), r2(2);
    r1 << std::cos(theta0), std::sin(theta0);
    r2 << std::cos(theta0 + beta), std::sin(theta0 + beta);
    Vec m1 = M * r1, m2 = M * r2;
    if (M.determinant() < 0) std::swap(m1, m2);
    out.image.kind = ConeImage::Kind::wedge2d;
    out.image.orientation = std::atan2(m1[1], m1[0]);
    out.image.opening = ccw_angle(m1, m2);
    out.p = std::numbers::pi / out.image.opening;
    if (out.image.opening > std::numbers::pi) out.note = "image wedge is not convex; p < 1";
    return out;
  }

  if (cone.is_orthant()) {
    const Mat off = M - Mat(M.diagonal().asDiagonal());
    if (off.cwiseAbs().maxCoeff() <= 1e-12 * M.cwiseAbs().maxCoeff() && (M.diagonal().array() > 0).all()) {
      out.image.kind = ConeImage::Kind::orthant;
      out.p = static_cast<double>(cone.dim());
      return out;
    }
  }

  if (!allow_fit) {
    std::ostringstream os;
    os << "cone_image_and_p: no closed-form degree for " << cone.describe()
       << " under a non-diagonal whitening map";
    throw ConfigError(os.str());
  }
  out.image.kind = ConeImage::Kind::unsupported;
  out.note = "homogeneity degree to be fitted from the driftless survival tail";
  return out;
}

WhiteningData whiten(const StepLaw& tilted, const ConeSpec& cone, WhiteningMode mode, bool allow_fit) {
  WhiteningData w;
  w.cov = tilted_covariance(tilted);
  w.M = whitening_matrix(w.cov, mode);
  w.Minv = w.M.inverse();
  if (w.cov.rows() == 2) w.alpha = correlation_2d(w.cov);
  auto img = cone_image_and_p(cone, w.M, allow_fit);
  w.cone_image = img.image;
  w.p = img.p;
  return w;
}

}  // namespace conelab
