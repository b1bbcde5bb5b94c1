#include "conelab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace conelab {

double TruncatedKernel::row_sum(std::size_t i) const {
  double s = 0.0;
  for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) s += weight[k];
  return s;
}

std::vector<std::pair<IVec, double>> TruncatedKernel::row(const IVec& x) const {
  std::vector<std::pair<IVec, double>> out;
  const auto it = std::find(states.begin(), states.end(), x);
  if (it == states.end()) return out;
  const auto i = static_cast<std::size_t>(it - states.begin());
  for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) out.emplace_back(states[col[k]], weight[k]);
  return out;
}

TruncatedKernel truncated_kernel(const StepLaw& law, const ConeSpec& cone, int L) {
  if (law.dim() != cone.dim()) throw ConfigError("truncated_kernel: dimension mismatch");
  if (L < 1) throw ConfigError("truncated_kernel: window radius must be positive");
  TruncatedKernel k;
  k.L = L;
  k.box = cone.window(L);
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> slot(k.box.size(), kNone);
  for (std::size_t i = 0; i < k.box.size(); ++i) {
    const IVec y = k.box.point(i);
    if (!cone.contains(y)) continue;
    slot[i] = k.states.size();
    k.states.push_back(y);
  }
  k.row_start.push_back(0);
  for (const IVec& x : k.states) {
    for (std::size_t j = 0; j < law.size(); ++j) {
      const IVec y = x + law.step(j);
      if (!k.box.contains(y)) continue;
      const std::size_t s = slot[k.box.index(y)];
      if (s == kNone) continue;
      k.col.push_back(s);
      k.weight.push_back(law.prob(j));
    }
    k.row_start.push_back(k.col.size());
  }
  return k;
}

namespace {

// Forward reachability from state 0 on the kernel graph (or its transpose).
std::vector<char> reach(const TruncatedKernel& k, bool transpose) {
  const std::size_t n = k.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t e = k.row_start[i]; e < k.row_start[i + 1]; ++e) {
      if (transpose) adj[k.col[e]].push_back(i);
      else adj[i].push_back(k.col[e]);
    }
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t j : adj[i])
      if (!seen[j]) {
        seen[j] = 1;
        stack.push_back(j);
      }
  }
  return seen;
}

void apply(const TruncatedKernel& k, const std::vector<double>& v, std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double m = v[i];
    if (m == 0.0) continue;
    for (std::size_t e = k.row_start[i]; e < k.row_start[i + 1]; ++e) out[k.col[e]] += m * k.weight[e];
  }
}

double l1(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

QsdResult qsd_power_iteration(const TruncatedKernel& k, double tol, int max_iter) {
  const std::size_t n = k.size();
  if (n == 0) throw ConfigError("qsd_power_iteration: empty kernel");
  QsdResult res;
  res.L = k.L;

  const auto fwd = reach(k, false);
  const auto bwd = reach(k, true);
  const auto strongly = static_cast<std::size_t>(std::count_if(
      fwd.begin(), fwd.end(), [&, i = std::size_t{0}](char f) mutable { return f && bwd[i++]; }));
  if (strongly != n) {
    std::ostringstream os;
    os << "kernel is not irreducible: the class of the first state holds " << strongly << " of " << n << " states";
    res.notes.push_back(os.str());
  }

  std::vector<double> v(n, 1.0 / static_cast<double>(n)), qv(n), next(n);
  for (int it = 1; it <= max_iter; ++it) {
    apply(k, v, qv);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = 0.5 * (v[i] + qv[i]);
      s += next[i];
    }
    if (!(s > 0.0)) throw NumericalError("qsd_power_iteration: mass vanished");
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= s;
      change += std::abs(next[i] - v[i]);
    }
    // One-step defect of the current iterate (qv / |qv| against v).
    double qs = 0.0, defect = 0.0;
    for (double x : qv) qs += x;
    for (std::size_t i = 0; i < n; ++i) defect += std::abs(qv[i] / qs - v[i]);
    v.swap(next);
    res.iterations = it;
    if (0.5 * change < tol && 0.5 * defect < tol) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged) {
    std::ostringstream os;
    os << "power iteration did not reach tol " << tol << " within " << max_iter << " iterations";
    res.notes.push_back(os.str());
  }

  apply(k, v, qv);
  res.lambda = l1(qv);
  double resid = 0.0;
  for (std::size_t i = 0; i < n; ++i) resid += std::abs(qv[i] / res.lambda - v[i]);
  res.residual = 0.5 * resid;

  const double total = l1(v);
  res.mu = Grid(k.box);
  for (std::size_t i = 0; i < n; ++i) res.mu[k.box.index(k.states[i])] = v[i] / total;
  return res;
}

double normalized_tv(const Grid& a, const Grid& b, const std::function<bool(const IVec&)>& keep) {
  if (a.box.dim() != b.box.dim()) throw ConfigError("normalized_tv: dimension mismatch");
  std::map<std::vector<int>, std::pair<double, double>> m;
  double sa = 0.0, sb = 0.0;
  auto add = [&](const Grid& g, bool first) {
    for (std::size_t i = 0; i < g.box.size(); ++i) {
      if (g[i] == 0.0) continue;
      const IVec p = g.box.point(i);
      if (keep && !keep(p)) continue;
      auto& e = m[std::vector<int>(p.data(), p.data() + p.size())];
      (first ? e.first : e.second) += g[i];
      (first ? sa : sb) += g[i];
    }
  };
  add(a, true);
  add(b, false);
  if (!(sa > 0.0) || !(sb > 0.0)) throw NumericalError("normalized_tv: a distribution has no mass");
  double tv = 0.0;
  for (const auto& [k, e] : m) tv += std::abs(e.first / sa - e.second / sb);
  return 0.5 * tv;
}

}  // namespace conelab
