#include "conelab/cramer.hpp"

#include <cmath>
#include <sstream>

namespace conelab {

MgfValue evaluate_mgf(const StepLaw& law, const Vec& h) {
  if (h.size() != law.dim()) throw ConfigError("evaluate_mgf: dimension mismatch");
  const int d = law.dim();
  MgfValue out{0.0, Vec::Zero(d), Mat::Zero(d, d)};
  for (std::size_t i = 0; i < law.size(); ++i) {
    const Vec z = to_real(law.step(i));
    const double w = law.prob(i) * std::exp(h.dot(z));
    out.value += w;
    out.gradient += w * z;
    out.hessian += w * z * z.transpose();
  }
  return out;
}

CramerData solve_cramer_point(const StepLaw& law, const NewtonOptions& opt) {
  const int d = law.dim();
  CramerData out;
  Vec h = Vec::Zero(d);
  MgfValue cur = evaluate_mgf(law, h);
  out.residual_history.push_back(cur.gradient.norm());

  int it = 0;
  while (cur.gradient.norm() > opt.grad_tol) {
    if (it == opt.max_iter) {
      std::ostringstream os;
      os << "Cramer point: Newton did not converge in " << opt.max_iter
         << " iterations (gradient norm " << cur.gradient.norm() << ")";
      throw NumericalError(os.str());
    }
    const Eigen::LDLT<Mat> ldlt(cur.hessian);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
      throw NumericalError("Cramer point: Hessian of R is not positive definite");
    const Vec step = -ldlt.solve(cur.gradient);
    const double slope = cur.gradient.dot(step);

    double t = 1.0;
    MgfValue next = evaluate_mgf(law, h + step);
    while (next.value > cur.value + opt.armijo * t * slope) {
      t *= 0.5;
      if (t < 1e-30) break;
      next = evaluate_mgf(law, h + t * step);
    }
    if (t < 1e-30) {
      // Line search stalled at roundoff level; accept the best point only
      // if it already meets the tolerance.
      if (next.gradient.norm() > opt.grad_tol)
        throw NumericalError("Cramer point: line search stalled before reaching tolerance");
    }
    h += t * step;
    cur = next;
    ++it;
    out.residual_history.push_back(cur.gradient.norm());
  }

  if (h.norm() <= 1e-10)
    throw ModelRejected("zero drift: Cramer point is h = 0, outside the nonzero drift regime");
  if (!(cur.value < 1.0)) throw NumericalError("Cramer point: c = R(h) >= 1");

  out.h = h;
  out.c = cur.value;
  out.grad_residual = cur.gradient.norm();
  out.iterations = it;
  out.tilted = tilt_law(law, h, out.c);
  return out;
}

StepLaw tilt_law(const StepLaw& law, const Vec& h, double c) {
  const double r = evaluate_mgf(law, h).value;
  if (std::abs(c - r) > 1e-10) {
    std::ostringstream os;
    os.precision(17);
    os << "tilt_law: c = " << c << " inconsistent with R(h) = " << r;
    throw NumericalError(os.str());
  }
  std::vector<double> p(law.size());
  double total = 0.0;
  for (std::size_t i = 0; i < law.size(); ++i) {
    p[i] = law.prob(i) * std::exp(h.dot(to_real(law.step(i)))) / c;
    total += p[i];
  }
  for (auto& v : p) v /= total;
  return StepLaw(law.support(), std::move(p));
}

}  // namespace conelab
