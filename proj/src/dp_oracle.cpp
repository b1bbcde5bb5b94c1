#include "conelab/dp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace conelab {

double DpSeries::log_raw_survival(int n) const {
  if (n < 0 || n > n_max) throw ConfigError("log_raw_survival: time outside horizon");
  return std::log(survival[n]) + n * std::log(rescale_by);
}

const Grid& DpSeries::table(int n) const {
  const auto it = tables.find(n);
  if (it == tables.end()) {
    std::ostringstream os;
    os << "DP table at n = " << n << " was not retained";
    throw ConfigError(os.str());
  }
  return it->second;
}

DpSeries dp_evolve(const StepLaw& law, const ConeSpec& cone, const IVec& x0, int n_max, const DpOptions& opt) {
  if (law.dim() != cone.dim() || x0.size() != cone.dim()) throw ConfigError("dp_evolve: dimension mismatch");
  if (!cone.contains(x0)) throw ConfigError("dp_evolve: start point " + format_point(x0) + " is not in K");
  if (n_max < 0) throw ConfigError("dp_evolve: negative horizon");
  if (!(opt.rescale_by > 0.0)) throw ConfigError("dp_evolve: rescale factor must be positive");

  DpSeries s;
  s.x0 = x0;
  s.n_max = n_max;
  s.rescale_by = opt.rescale_by;
  s.box = cone.window(opt.window);
  if (!s.box.contains(x0)) throw ConfigError("dp_evolve: start point outside the window");
  const Box& box = s.box;
  const std::size_t ncell = box.size();

  // Per cell: in-cone flag; per (cell, step): target index or a sentinel.
  constexpr std::size_t kKilled = std::numeric_limits<std::size_t>::max();
  constexpr std::size_t kLeak = kKilled - 1;
  std::vector<char> inside(ncell, 0);
  for (std::size_t i = 0; i < ncell; ++i) inside[i] = cone.contains(box.point(i));
  const std::size_t ns = law.size();
  std::vector<std::size_t> target(ncell * ns, kKilled);
  for (std::size_t i = 0; i < ncell; ++i) {
    if (!inside[i]) continue;
    const IVec y = box.point(i);
    for (std::size_t k = 0; k < ns; ++k) {
      const IVec t = y + law.step(k);
      if (!cone.contains(t)) continue;
      target[i * ns + k] = box.contains(t) ? box.index(t) : kLeak;
    }
  }
  std::vector<double> prob(ns);
  for (std::size_t k = 0; k < ns; ++k) prob[k] = law.prob(k) / opt.rescale_by;

  std::set<int> keep(opt.retain.begin(), opt.retain.end());
  std::vector<double> cur(ncell, 0.0), next(ncell, 0.0);
  cur[box.index(x0)] = 1.0;
  s.survival.reserve(n_max + 1);
  s.survival.push_back(1.0);
  if (opt.retain_all || keep.count(0)) {
    Grid g(box);
    g.values = cur;
    s.tables.emplace(0, std::move(g));
  }

  for (int n = 1; n <= n_max; ++n) {
    std::fill(next.begin(), next.end(), 0.0);
    double leak = 0.0;
    for (std::size_t i = 0; i < ncell; ++i) {
      const double m = cur[i];
      if (m == 0.0) continue;
      const std::size_t* tg = &target[i * ns];
      for (std::size_t k = 0; k < ns; ++k) {
        if (tg[k] < kLeak) next[tg[k]] += m * prob[k];
        else if (tg[k] == kLeak) leak += m * prob[k];
      }
    }
    cur.swap(next);
    double total = 0.0;
    for (double v : cur) total += v;
    s.survival.push_back(total);
    if (total > 0.0) {
      s.max_edge_ratio = std::max(s.max_edge_ratio, leak / total);
      if (leak > opt.edge_tol * total) {
        const int suggested = std::max(opt.window + 1, static_cast<int>(std::ceil(opt.window * 1.5)));
        std::ostringstream os;
        os << "dp_evolve: mass leaving the window at n = " << n << " is " << leak / total
           << " of the surviving mass (tolerance " << opt.edge_tol << "); try window " << suggested;
        throw WindowTooSmall(os.str(), suggested);
      }
    }
    if (opt.retain_all || keep.count(n)) {
      Grid g(box);
      g.values = cur;
      s.tables.emplace(n, std::move(g));
    }
  }
  return s;
}

double exit_time_mass(const DpSeries& s, int n) {
  if (n < 1 || n > s.n_max) throw ConfigError("exit_time_mass: time outside horizon");
  return s.survival[n - 1] / s.rescale_by - s.survival[n];
}

double log_exit_time_probability(const DpSeries& s, int n) {
  return std::log(exit_time_mass(s, n)) + n * std::log(s.rescale_by);
}

double hazard_ratio(const DpSeries& s, int n) { return exit_time_mass(s, n) / s.survival.at(n); }

std::map<std::vector<int>, double> exit_position_law(const DpSeries& s, const StepLaw& law, const ConeSpec& cone,
                                                    int n) {
  const Grid& q = s.table(n - 1);
  std::map<std::vector<int>, double> out;
  for (std::size_t i = 0; i < q.box.size(); ++i) {
    if (q[i] == 0.0) continue;
    const IVec z = q.box.point(i);
    for (std::size_t k = 0; k < law.size(); ++k) {
      const IVec y = z + law.step(k);
      if (cone.contains(y)) continue;
      out[std::vector<int>(y.data(), y.data() + y.size())] += q[i] * law.prob(k);
    }
  }
  return out;
}

double bridge_probability(const DpSeries& from_x, const DpSeries& from_y, const IVec& z, int m, int n) {
  if (from_x.rescale_by != from_y.rescale_by) throw ConfigError("bridge_probability: rescalings differ");
  if (m < 0 || m > n) throw ConfigError("bridge_probability: need 0 <= m <= n");
  const double qxy = from_x.table(m).at(from_y.x0);
  const double qyz = from_y.table(n - m).at(z);
  const double qxz = from_x.table(n).at(z);
  if (qxz == 0.0) throw DomainError("bridge_probability: endpoint " + format_point(z) + " unreachable at time n");
  return qxy * qyz / qxz;
}

double check_identity_h12(const StepLaw& law, const CramerData& cramer, const ConeSpec& cone, const IVec& x0,
                          int n_max, int window) {
  DpOptions drifted{window, cramer.c, {}, true, 1.0};
  DpOptions driftless{window, 1.0, {}, true, 1.0};
  const DpSeries q = dp_evolve(law, cone, x0, n_max, drifted);
  const DpSeries d = dp_evolve(cramer.tilted, cone, x0, n_max, driftless);
  double worst = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const Grid& gq = q.table(n);
    const Grid& gd = d.table(n);
    for (std::size_t i = 0; i < gq.box.size(); ++i) {
      const double w = std::exp(cramer.h.dot(to_real(x0 - gq.box.point(i))));
      worst = std::max(worst, std::abs(gq[i] - w * gd[i]));
    }
  }
  return worst;
}

HalfspaceReduction halfspace_1d(const StepLaw& law, const Vec& normal, int x0_height, int n_max, int window) {
  if (normal.size() != law.dim()) throw ConfigError("halfspace_1d: dimension mismatch");
  if (x0_height < 1) throw ConfigError("halfspace_1d: start height must be a positive integer");
  std::map<int, double> proj;
  for (std::size_t k = 0; k < law.size(); ++k) {
    const double v = normal.dot(to_real(law.step(k)));
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-12) throw ConfigError("halfspace_1d: projection a.X is not integer valued");
    proj[static_cast<int>(r)] += law.prob(k);
  }
  std::vector<IVec> sup;
  std::vector<double> p;
  for (const auto& [v, w] : proj) {
    sup.push_back(IVec::Constant(1, v));
    p.push_back(w);
  }
  HalfspaceReduction out;
  out.projected = StepLaw(std::move(sup), std::move(p));
  if (!(out.projected.mean()[0] < 0.0)) throw ModelRejected("halfspace_1d: projected drift a.E[X] must be negative");
  const auto cr = solve_cramer_point(out.projected);
  out.c1 = cr.c;
  out.t_star = cr.h[0];
  const ConeSpec half = ConeSpec::halfspace(Vec::Ones(1));
  DpOptions opt;
  opt.window = window;
  opt.rescale_by = out.c1;
  out.series = dp_evolve(out.projected, half, IVec::Constant(1, x0_height), n_max, opt);
  return out;
}

}  // namespace conelab
