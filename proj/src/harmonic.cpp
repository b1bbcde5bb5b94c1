#include "conelab/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace conelab {

namespace {

constexpr double kDomainTol = 1e-9;

double wrap_angle(double a) {
  a = std::fmod(a, 2 * std::numbers::pi);
  return a < 0 ? a + 2 * std::numbers::pi : a;
}

// Sparse affine map V -> A V + b over the cells of a window.
struct KilledIteration {
  std::vector<std::size_t> row_start;
  std::vector<std::size_t> col;
  std::vector<double> weight;
  std::vector<double> constant;
  std::vector<char> active;  // cell lies in K
  std::vector<char> inner;   // cell lies in the inner half-window
};

KilledIteration assemble(const StepLaw& law, const ConeSpec& cone, const Box& box, const Mat& M,
                         const ContinuousHarmonic& u, int L) {
  KilledIteration it;
  const std::size_t n = box.size();
  it.row_start.reserve(n + 1);
  it.constant.assign(n, 0.0);
  it.active.assign(n, 0);
  it.inner.assign(n, 0);
  it.row_start.push_back(0);
  for (std::size_t i = 0; i < n; ++i) {
    const IVec y = box.point(i);
    if (cone.contains(y)) {
      it.active[i] = 1;
      it.inner[i] = y.cwiseAbs().maxCoeff() <= L / 2;
      for (std::size_t k = 0; k < law.size(); ++k) {
        const IVec t = y + law.step(k);
        if (!cone.contains(t)) continue;
        if (box.contains(t)) {
          it.col.push_back(box.index(t));
          it.weight.push_back(law.prob(k));
        } else {
          it.constant[i] += law.prob(k) * u_eval(u, M * to_real(t));
        }
      }
    }
    it.row_start.push_back(it.col.size());
  }
  return it;
}

struct IterationResult {
  Grid values;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

IterationResult iterate(const KilledIteration& it, const Box& box, const Mat& M, const ContinuousHarmonic& u,
                        const HarmonicOptions& opt) {
  IterationResult res{Grid(box), 0, 0.0, false};
  std::vector<double>& v = res.values.values;
  for (std::size_t i = 0; i < box.size(); ++i)
    if (it.active[i]) v[i] = u_eval(u, M * to_real(box.point(i)));

  std::vector<double> next(v.size(), 0.0);
  for (int n = 1; n <= opt.max_iter; ++n) {
    double change = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!it.active[i]) continue;
      double s = it.constant[i];
      for (std::size_t k = it.row_start[i]; k < it.row_start[i + 1]; ++k) s += it.weight[k] * v[it.col[k]];
      next[i] = s;
      if (it.inner[i] && s > 0.0) change = std::max(change, std::abs(s - v[i]) / s);
    }
    v.swap(next);
    res.iterations = n;
    res.residual = change;
    if (change < opt.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace

ContinuousHarmonic ContinuousHarmonic::for_image(const ConeImage& image, double p) {
  ContinuousHarmonic u;
  u.p = p;
  switch (image.kind) {
    case ConeImage::Kind::wedge2d:
      u.kind = Kind::wedge2d;
      u.theta1 = image.orientation;
      break;
    case ConeImage::Kind::orthant:
      u.kind = Kind::orthant_product;
      break;
    case ConeImage::Kind::halfspace:
      u.kind = Kind::halfline;
      u.normal = image.normal;
      break;
    case ConeImage::Kind::unsupported:
      throw ConfigError("no closed-form harmonic function for this cone image");
  }
  return u;
}

double u_eval(const ContinuousHarmonic& u, const Vec& x) {
  const double r = x.norm();
  if (r == 0.0) return 0.0;
  switch (u.kind) {
    case ContinuousHarmonic::Kind::wedge2d: {
      if (x.size() != 2) throw DomainError("u_eval: wedge2d needs a 2D point");
      const double span = std::numbers::pi / u.p;
      double rel = wrap_angle(std::atan2(x[1], x[0]) - u.theta1);
      if (rel > 2 * std::numbers::pi - kDomainTol) rel = 0.0;
      if (rel > span + kDomainTol) throw DomainError("u_eval: point outside the closed wedge");
      rel = std::min(rel, span);
      return std::max(0.0, std::pow(r, u.p) * std::sin(u.p * rel));
    }
    case ContinuousHarmonic::Kind::orthant_product: {
      if (x.minCoeff() < -kDomainTol * r) throw DomainError("u_eval: point outside the closed orthant");
      return x.cwiseMax(0.0).prod();
    }
    case ContinuousHarmonic::Kind::halfline: {
      if (x.size() != u.normal.size()) throw DomainError("u_eval: dimension mismatch");
      const double s = u.normal.dot(x) / u.normal.norm();
      if (s < -kDomainTol * r) throw DomainError("u_eval: point outside the closed half-space");
      return std::max(0.0, s);
    }
  }
  return 0.0;
}

HarmonicTables build_V_tables(const StepLaw& tilted, const ConeSpec& cone, const Mat& M,
                              const ContinuousHarmonic& u, const HarmonicOptions& opt) {
  if (tilted.mean().norm() > 1e-10) throw NumericalError("build_V_tables: step law is not driftless");
  if (tilted.dim() != cone.dim()) throw ConfigError("build_V_tables: dimension mismatch");

  HarmonicTables t;
  t.box = cone.window(opt.window);
  t.M = M;
  t.u = u;

  const auto fwd = iterate(assemble(tilted, cone, t.box, M, u, opt.window), t.box, M, u, opt);
  const StepLaw reversed = tilted.negated();
  const auto rev = iterate(assemble(reversed, cone, t.box, M, u, opt.window), t.box, M, u, opt);

  t.V = fwd.values;
  t.Vprime = rev.values;
  t.iterations_V = fwd.iterations;
  t.iterations_Vprime = rev.iterations;
  t.residual_V = fwd.residual;
  t.residual_Vprime = rev.residual;
  t.converged = fwd.converged && rev.converged;
  if (!t.converged) {
    std::ostringstream os;
    os << "harmonic tables not converged within " << opt.max_iter << " iterations (residuals " << fwd.residual
       << ", " << rev.residual << ")";
    t.notes.push_back(os.str());
  }

  for (std::size_t i = 0; i < t.box.size(); ++i) {
    const double v = std::max(t.V[i], t.Vprime[i]);
    if (v <= 0.0) continue;
    const double norm = (M * to_real(t.box.point(i))).norm();
    t.growth_constant = std::max(t.growth_constant, v / (1.0 + std::pow(norm, u.p)));
  }
  return t;
}

HarmonicTables build_U_tables(HarmonicTables t, const Vec& h, double c, double worst_angle) {
  if (h.size() != t.box.dim()) throw ConfigError("build_U_tables: dimension mismatch");
  t.h = h;
  t.c = c;
  t.U = Grid(t.box);
  t.Uprime = Grid(t.box);
  double mass = 0.0;
  for (std::size_t i = 0; i < t.box.size(); ++i) {
    if (t.V[i] == 0.0 && t.Vprime[i] == 0.0) continue;
    const double hy = h.dot(to_real(t.box.point(i)));
    if (std::abs(hy) > 700.0) throw NumericalError("build_U_tables: exp(h.y) overflows; reduce the window");
    t.U[i] = std::exp(hy) * t.V[i];
    t.Uprime[i] = std::exp(-hy) * t.Vprime[i];
    mass += t.Uprime[i];
  }
  if (!(mass > 0.0)) throw NumericalError("build_U_tables: U' has no mass on the window");
  t.kappa = 1.0 / mass;

  // Outside the window |y|_inf > L, h.y >= a |y| with a = |h| cos(worst
  // angle), and V' <= C (1 + |My|^p); sum shells of the sup-norm ball.
  const int d = t.box.dim();
  const int L = t.box.hi().maxCoeff();
  const double a = h.norm() * std::cos(worst_angle);
  if (!(a > 0.0)) throw NumericalError("build_U_tables: exp(-h.y) is not summable over the cone");
  const double mnorm = t.M.operatorNorm() * std::sqrt(static_cast<double>(d));
  auto shell_term = [&](int r) {
    const double count = std::pow(2.0 * r + 1, d) - std::pow(2.0 * r - 1, d);
    return count * t.growth_constant * (1.0 + std::pow(mnorm * r, t.u.p)) * std::exp(-a * r);
  };
  double tail = 0.0;
  for (int r = L + 1;; ++r) {
    const double term = shell_term(r);
    tail += term;
    if (r > L + 10 && term < 1e-18 * tail) break;
    if (r > 100 * (L + 10)) break;
  }
  t.tail_bound = tail;
  if (tail >= 1e-8 * mass) {
    int need = L;
    double rest = tail;
    while (rest >= 1e-8 * mass && need < 100000) {
      rest -= shell_term(++need);
    }
    std::ostringstream os;
    os << "U' tail outside the window is bounded only by " << tail << " (need < " << 1e-8 * mass
       << "); window radius >= " << need << " required";
    throw WindowTooSmall(os.str(), need);
  }
  return t;
}

HarmonicTables build_harmonic_tables(const ConeSpec& cone, const CramerData& cramer, const WhiteningData& white,
                                     const HarmonicOptions& opt) {
  if (!white.p) throw ConfigError("harmonic tables need a closed-form homogeneity degree");
  const auto u = ContinuousHarmonic::for_image(white.cone_image, *white.p);
  const auto a5 = check_assumption5(cone, cramer.h);
  if (!a5.ok) throw ModelRejected("Assumption 5 violated: " + a5.note);
  auto t = build_V_tables(cramer.tilted, cone, white.M, u, opt);
  return build_U_tables(std::move(t), cramer.h, cramer.c, a5.worst_angle);
}

double harmonic_residual(const Grid& f, const StepLaw& law, const ConeSpec& cone, const IVec& y, double scale) {
  double s = 0.0;
  for (std::size_t k = 0; k < law.size(); ++k) {
    const IVec t = y + law.step(k);
    if (cone.contains(t)) s += law.prob(k) * f.at(t);
  }
  const double ref = scale * f.at(y);
  return std::abs(s - ref) / ref;
}

}  // namespace conelab
