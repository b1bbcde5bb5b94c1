#pragma once

#include <optional>
#include <string>

#include "conelab/model.hpp"

namespace conelab {

enum class WhiteningMode { general, example2d };

// Second-moment matrix of a driftless law; throws unless positive definite.
Mat tilted_covariance(const StepLaw& tilted);

// general: symmetric inverse square root. example2d: the explicit rotation
// and scaling built from the normalized correlation alpha.
Mat whitening_matrix(const Mat& cov, WhiteningMode mode);

// Normalized correlation cov01 / sqrt(cov00 cov11) of a 2x2 covariance.
double correlation_2d(const Mat& cov);

// Image of a cone under the whitening map, described in the form the
// harmonic module needs.
struct ConeImage {
  enum class Kind { wedge2d, orthant, halfspace, unsupported };
  Kind kind = Kind::unsupported;
  double opening = 0.0;      // wedge2d: opening of M K
  double orientation = 0.0;  // wedge2d: angle of the first boundary ray
  Vec normal;                // halfspace: normal of M K
  int dim = 0;
};

struct ConeImageResult {
  ConeImage image;
  // Homogeneity degree; empty when it has to be fitted numerically.
  std::optional<double> p;
  std::string note;
};

ConeImageResult cone_image_and_p(const ConeSpec& cone, const Mat& M, bool allow_fit = false);

struct WhiteningData {
  Mat cov;
  Mat M;
  Mat Minv;
  double alpha = 0.0;  // 2D only
  ConeImage cone_image;
  std::optional<double> p;
};

WhiteningData whiten(const StepLaw& tilted, const ConeSpec& cone, WhiteningMode mode = WhiteningMode::general,
                     bool allow_fit = false);

}  // namespace conelab
