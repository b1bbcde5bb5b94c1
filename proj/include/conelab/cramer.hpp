#pragma once

#include <vector>

#include "conelab/model.hpp"

namespace conelab {

struct MgfValue {
  double value;   // R(h) = E[exp(h.X)]
  Vec gradient;   // E[X exp(h.X)]
  Mat hessian;    // E[X X^T exp(h.X)]
};

MgfValue evaluate_mgf(const StepLaw& law, const Vec& h);

// Cramer point h (nonzero minimizer of R), survival rate c = R(h), and the
// exponentially tilted law of X~.
struct CramerData {
  Vec h;
  double c = 0.0;
  StepLaw tilted;
  double grad_residual = 0.0;
  int iterations = 0;
  // Gradient norms at the accepted Newton iterates, starting at h = 0.
  std::vector<double> residual_history;
};

struct NewtonOptions {
  double grad_tol = 1e-12;
  int max_iter = 200;
  double armijo = 1e-4;
};

CramerData solve_cramer_point(const StepLaw& law, const NewtonOptions& opt = {});

// Law with probabilities exp(h.z) p_z / c, renormalized by their computed sum.
// Throws NumericalError unless |c - R(h)| <= 1e-10.
StepLaw tilt_law(const StepLaw& law, const Vec& h, double c);

}  // namespace conelab
