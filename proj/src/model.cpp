#include "conelab/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

namespace conelab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRayEps = 1e-12;

double angle_between(const Vec& u, const Vec& v) {
  const double dot = u.dot(v);
  const Vec perp = u - (dot / v.squaredNorm()) * v;
  return std::atan2(perp.norm() * v.norm(), dot);
}

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0 ? a + kTwoPi : a;
}

Vec ray(double theta) {
  Vec u(2);
  u << std::cos(theta), std::sin(theta);
  return u;
}

double distance_to_ray(const Vec& x, const Vec& u) {
  const double t = std::max(0.0, x.dot(u));
  return (x - t * u).norm();
}

}  // namespace

// ---------------------------------------------------------------- StepLaw

StepLaw::StepLaw(std::vector<IVec> support, std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  if (support_.empty()) throw ConfigError("step law: empty support");
  if (support_.size() != probs_.size()) throw ConfigError("step law: support/probability size mismatch");
  dim_ = static_cast<int>(support_.front().size());
  if (dim_ < 1) throw ConfigError("step law: dimension must be at least 1");
  double total = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (support_[i].size() != dim_) throw ConfigError("step law: support vectors of differing dimension");
    if (!(probs_[i] > 0.0)) throw ConfigError("step law: probabilities must be strictly positive");
    total += probs_[i];
    for (std::size_t j = 0; j < i; ++j)
      if (support_[j] == support_[i])
        throw ConfigError("step law: duplicate support vector " + format_point(support_[i]));
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "step law: probabilities sum to " << total << ", not 1";
    throw ConfigError(os.str());
  }
}

Vec StepLaw::mean() const {
  Vec m = Vec::Zero(dim_);
  for (std::size_t i = 0; i < size(); ++i) m += probs_[i] * to_real(support_[i]);
  return m;
}

Mat StepLaw::second_moment() const {
  Mat s = Mat::Zero(dim_, dim_);
  for (std::size_t i = 0; i < size(); ++i) {
    const Vec z = to_real(support_[i]);
    s += probs_[i] * z * z.transpose();
  }
  return s;
}

int StepLaw::max_step() const {
  int m = 0;
  for (const auto& z : support_) m = std::max(m, z.cwiseAbs().maxCoeff());
  return m;
}

StepLaw StepLaw::negated() const {
  std::vector<IVec> s;
  s.reserve(support_.size());
  for (const auto& z : support_) s.push_back(-z);
  return StepLaw(std::move(s), probs_);
}

double StepLaw::prob_of(const IVec& z) const {
  for (std::size_t i = 0; i < size(); ++i)
    if (support_[i] == z) return probs_[i];
  return 0.0;
}

// ---------------------------------------------------------------- ConeSpec

ConeSpec ConeSpec::orthant(int d) {
  if (d < 2) throw ConfigError("orthant cone requires d >= 2");
  return ConeSpec(Orthant{d});
}

ConeSpec ConeSpec::wedge2d(double opening, double rotation) {
  if (!(opening > 0.0 && opening < kTwoPi)) throw ConfigError("wedge2d: opening must lie in (0, 2pi)");
  return ConeSpec(Wedge2d{opening, rotation});
}

ConeSpec ConeSpec::halfspace(Vec normal) {
  if (normal.size() < 1 || normal.norm() == 0.0) throw ConfigError("halfspace: normal must be nonzero");
  return ConeSpec(HalfSpace{std::move(normal)});
}

int ConeSpec::dim() const {
  return std::visit(
      [](const auto& c) -> int {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Orthant>) return c.dim;
        else if constexpr (std::is_same_v<T, Wedge2d>) return 2;
        else return static_cast<int>(c.normal.size());
      },
      v_);
}

std::string ConeSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Orthant>) os << "orthant(" << c.dim << ")";
        else if constexpr (std::is_same_v<T, Wedge2d>) os << "wedge2d(opening=" << c.opening << ", rotation=" << c.rotation << ")";
        else os << "halfspace(normal=" << c.normal.transpose() << ")";
      },
      v_);
  return os.str();
}

bool ConeSpec::contains(const IVec& x) const {
  if (const auto* o = std::get_if<Orthant>(&v_)) {
    if (x.size() != o->dim) throw ConfigError("cone: dimension mismatch");
    return (x.array() > 0).all();
  }
  return contains(to_real(x));
}

bool ConeSpec::contains(const Vec& x) const {
  if (x.size() != dim()) throw ConfigError("cone: dimension mismatch");
  return std::visit(
      [&](const auto& c) -> bool {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Orthant>) {
          return (x.array() > 0.0).all();
        } else if constexpr (std::is_same_v<T, Wedge2d>) {
          if (x[0] == 0.0 && x[1] == 0.0) return false;
          const double phi = wrap_angle(std::atan2(x[1], x[0]) - c.rotation);
          return phi > kRayEps && phi < c.opening - kRayEps;
        } else {
          return c.normal.dot(x) > 0.0;
        }
      },
      v_);
}

Box ConeSpec::window(int L) const {
  if (L < 1) throw ConfigError("window radius must be positive");
  const int d = dim();
  IVec lo = IVec::Constant(d, -L), hi = IVec::Constant(d, L);
  if (is_orthant()) {
    lo.setZero();
  } else if (const auto* hs = std::get_if<HalfSpace>(&v_); hs && d == 1) {
    if (hs->normal[0] > 0) lo.setZero();
    else hi.setZero();
  }
  return Box(lo, hi);
}

ConeGeometry cone_geometry(const ConeSpec& cone, const Vec& x) {
  if (x.size() != cone.dim()) throw ConfigError("cone_geometry: dimension mismatch");
  const bool inside = cone.contains(x);
  return std::visit(
      [&](const auto& c) -> ConeGeometry {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Orthant>) {
          if (inside) return {true, x.minCoeff()};
          const Vec clipped = x.cwiseMax(0.0);
          return {false, (x - clipped).norm()};
        } else if constexpr (std::is_same_v<T, Wedge2d>) {
          const double d1 = distance_to_ray(x, ray(c.rotation));
          const double d2 = distance_to_ray(x, ray(c.rotation + c.opening));
          return {inside, std::min(d1, d2)};
        } else {
          return {inside, std::abs(c.normal.dot(x)) / c.normal.norm()};
        }
      },
      cone.variant());
}

// ---------------------------------------------------------------- model

SubLattice difference_lattice(const StepLaw& law) {
  std::vector<IVec> gens;
  for (std::size_t i = 1; i < law.size(); ++i) gens.push_back(law.step(i) - law.step(0));
  return SubLattice::generated_by(gens, law.dim());
}

ReachableCoset::ReachableCoset(const StepLaw& law, IVec x0, int n)
    : lattice_(difference_lattice(law)), base_(std::move(x0)) {
  base_ += n * law.step(0);
}

bool ReachableCoset::contains(const IVec& y) const { return lattice_.contains(y - base_); }

namespace {

// Breadth-first closure of the difference group inside [-R, R]^d.
bool difference_group_fills_box(const StepLaw& law, int R) {
  const int d = law.dim();
  const Box box(IVec::Constant(d, -R), IVec::Constant(d, R));
  std::vector<IVec> gens;
  for (std::size_t i = 1; i < law.size(); ++i) {
    const IVec g = law.step(i) - law.step(0);
    gens.push_back(g);
    gens.push_back(-g);
  }
  std::vector<char> seen(box.size(), 0);
  std::deque<IVec> queue;
  const IVec origin = IVec::Zero(d);
  seen[box.index(origin)] = 1;
  queue.push_back(origin);
  std::size_t reached = 1;
  while (!queue.empty()) {
    const IVec p = queue.front();
    queue.pop_front();
    for (const auto& g : gens) {
      const IVec q = p + g;
      if (!box.contains(q)) continue;
      auto& s = seen[box.index(q)];
      if (s) continue;
      s = 1;
      ++reached;
      queue.push_back(q);
    }
  }
  return reached == box.size();
}

}  // namespace

ModelReport build_model(const StepLaw& law, const ConeSpec& cone) {
  if (law.dim() != cone.dim()) throw ConfigError("dimension mismatch between step law and cone");
  const int d = law.dim();

  ModelReport rep;
  rep.drift = law.mean();

  Mat centered(d, static_cast<Eigen::Index>(law.size()));
  for (std::size_t i = 0; i < law.size(); ++i) centered.col(i) = to_real(law.step(i) - law.step(0));
  Eigen::FullPivLU<Mat> lu(centered);
  lu.setThreshold(1e-9);
  rep.noncollinear = lu.rank() == d;
  if (!rep.noncollinear)
    throw ModelRejected("Assumption 2 violated: support is contained in an affine hyperplane (collinear walk)");

  if (rep.drift.norm() <= 1e-14) throw ModelRejected("zero drift: the walk must have nonzero drift");

  const SubLattice g = difference_lattice(law);
  rep.difference_lattice_index = g.index();
  if (difference_group_fills_box(law, kAperiodicityBox)) {
    rep.aperiodicity = Aperiodicity::verified;
  } else {
    rep.aperiodicity = Aperiodicity::inconclusive;
    std::ostringstream os;
    os << "strong aperiodicity not verified within the residue box of radius " << kAperiodicityBox;
    if (rep.difference_lattice_index > 1)
      os << "; step differences generate a sublattice of index " << rep.difference_lattice_index
         << " (the walk is periodic; pointwise limit laws hold per reachable coset)";
    rep.notes.push_back(os.str());
  }

  if (cone.is_halfspace())
    rep.notes.push_back("halfspace cone violates Assumption 5; only the one-dimensional reduction applies");
  if (const auto* w = std::get_if<Wedge2d>(&cone.variant()); w && w->opening > std::numbers::pi)
    rep.notes.push_back("wedge opening exceeds pi: cone is not convex");
  return rep;
}

Assumption5Result check_assumption5(const ConeSpec& cone, const Vec& h) {
  if (h.size() != cone.dim()) throw ConfigError("check_assumption5: dimension mismatch");
  if (h.norm() == 0.0) throw ConfigError("check_assumption5: h must be nonzero");
  const Vec hn = h.normalized();

  if (cone.is_halfspace())
    return {false, std::numbers::pi / 2,
            "halfspace cones fail Assumption 5; use the one-dimensional reduction"};

  double worst = 0.0;
  if (const auto* w = std::get_if<Wedge2d>(&cone.variant())) {
    worst = std::max(angle_between(ray(w->rotation), hn), angle_between(ray(w->rotation + w->opening), hn));
  } else {
    const int d = cone.dim();
    for (int i = 0; i < d; ++i) worst = std::max(worst, angle_between(Vec::Unit(d, i), hn));
    if (d >= 3) {
      // Faces {x_k = 0}: scan a simplex grid of nonnegative directions.
      constexpr int m = 12;
      std::vector<int> c(d - 1, 0);
      for (int k = 0; k < d; ++k) {
        std::function<void(int, int)> rec = [&](int pos, int left) {
          if (pos == d - 2) {
            c[pos] = left;
            Vec x = Vec::Zero(d);
            for (int j = 0, t = 0; j < d; ++j)
              if (j != k) x[j] = c[t++];
            if (x.norm() > 0) worst = std::max(worst, angle_between(x, hn));
            return;
          }
          for (int v = 0; v <= left; ++v) {
            c[pos] = v;
            rec(pos + 1, left - v);
          }
        };
        rec(0, m);
      }
    }
  }
  const bool ok = worst < std::numbers::pi / 2 - kAngleTolerance;
  return {ok, worst, ok ? "" : "boundary direction at angle >= pi/2 from h"};
}

}  // namespace conelab
