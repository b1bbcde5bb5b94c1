#include "conelab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace conelab {

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

StepSampler::StepSampler(const StepLaw& law) {
  double acc = 0.0;
  for (double p : law.probs()) {
    acc += p;
    cdf_.push_back(acc);
  }
  cdf_.back() = 1.0;
}

std::size_t StepSampler::sample(StreamRng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), cdf_.size() - 1));
}

double McEstimate::relative_error() const {
  if (value == 0.0) return std::numeric_limits<double>::infinity();
  return std_error / std::abs(value);
}

namespace {

struct Partial {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t hits = 0;
};

// Splits [0, n_samples) into contiguous blocks, one RNG stream per worker,
// and combines in worker order.
template <class PathFn>
Partial fan_out(const McOptions& opt, PathFn path) {
  const int workers = std::max(1, opt.workers);
  std::vector<Partial> parts(workers);
  auto run = [&](int w) {
    StreamRng rng(opt.seed, static_cast<std::uint64_t>(w));
    const std::int64_t lo = opt.n_samples * w / workers;
    const std::int64_t hi = opt.n_samples * (w + 1) / workers;
    Partial& p = parts[w];
    for (std::int64_t i = lo; i < hi; ++i) {
      const double v = path(rng);
      if (v != 0.0) {
        p.sum += v;
        p.sum_sq += v * v;
        ++p.hits;
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  Partial total;
  for (const auto& p : parts) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
    total.hits += p.hits;
  }
  return total;
}

void finish(McEstimate& e, const Partial& t, double log_scale) {
  const auto n = static_cast<double>(e.n_samples);
  const double mean = t.sum / n;
  const double var = n > 1 ? std::max(0.0, (t.sum_sq - n * mean * mean) / (n - 1)) : 0.0;
  e.hits = t.hits;
  e.log_value = mean > 0 ? std::log(mean) + log_scale : -std::numeric_limits<double>::infinity();
  e.value = std::exp(e.log_value);
  e.std_error = std::exp(log_scale) * std::sqrt(var / n);
}

}  // namespace

McEstimate mc_survival(const StepLaw& law, const ConeSpec& cone, const IVec& x0, int n, const McOptions& opt) {
  if (opt.n_samples < 1) throw ConfigError("mc_survival: n_samples must be at least 1");
  if (!cone.contains(x0)) throw ConfigError("mc_survival: start point is not in K");
  McEstimate e{"direct", 0, 0, 0, opt.n_samples, 0, opt.seed, std::max(1, opt.workers)};
  if (n == 0) {
    e.value = 1.0;
    e.hits = opt.n_samples;
    return e;
  }
  const StepSampler sampler(law);
  const Partial t = fan_out(opt, [&](StreamRng& rng) {
    IVec y = x0;
    for (int k = 0; k < n; ++k) {
      y += law.step(sampler.sample(rng));
      if (!cone.contains(y)) return 0.0;
    }
    return 1.0;
  });
  finish(e, t, 0.0);
  return e;
}

McEstimate is_survival(const CramerData& cramer, const ConeSpec& cone, const IVec& x0, int n, const McOptions& opt) {
  if (opt.n_samples < 1) throw ConfigError("is_survival: n_samples must be at least 1");
  if (!cone.contains(x0)) throw ConfigError("is_survival: start point is not in K");
  McEstimate e{"importance", 0, 0, 0, opt.n_samples, 0, opt.seed, std::max(1, opt.workers)};
  if (n == 0) {
    e.value = 1.0;
    e.hits = opt.n_samples;
    return e;
  }
  const StepLaw& tilted = cramer.tilted;
  const StepSampler sampler(tilted);
  const Partial t = fan_out(opt, [&](StreamRng& rng) {
    IVec y = x0;
    for (int k = 0; k < n; ++k) {
      y += tilted.step(sampler.sample(rng));
      if (!cone.contains(y)) return 0.0;
    }
    return std::exp(-cramer.h.dot(to_real(y - x0)));
  });
  // c^n is carried in log space.
  finish(e, t, n * std::log(cramer.c));
  return e;
}

ZChainPath z_chain(const StepLaw& law, const ConeSpec& cone, const HarmonicTables& tables, const IVec& x0,
                   int n_steps, std::uint64_t seed, std::uint64_t stream) {
  if (!tables.in_window(x0) || !cone.contains(x0)) throw ConfigError("z_chain: start point outside the table window");
  if (tables.U.values.empty()) throw ConfigError("z_chain: U table not built");
  StreamRng rng(seed, stream);
  ZChainPath path;
  path.positions.push_back(x0);
  IVec x = x0;
  std::vector<double> w(law.size());
  for (int k = 0; k < n_steps; ++k) {
    const double ux = tables.U_at(x);
    double row = 0.0;
    for (std::size_t j = 0; j < law.size(); ++j) {
      const IVec y = x + law.step(j);
      w[j] = 0.0;
      if (!cone.contains(y)) continue;
      if (!tables.in_window(y)) {
        path.truncated = true;
        path.notice = "z_chain: reached the table window edge at " + format_point(x) + " after " +
                      std::to_string(k) + " steps";
        return path;
      }
      w[j] = law.prob(j) * tables.U_at(y) / (tables.c * ux);
      row += w[j];
    }
    path.row_sums.push_back(row);
    double u = rng.uniform() * row;
    std::size_t pick = law.size();
    for (std::size_t j = 0; j < law.size(); ++j) {
      if (w[j] == 0.0) continue;
      pick = j;
      if (u < w[j]) break;
      u -= w[j];
    }
    if (pick == law.size()) throw NumericalError("z_chain: empty transition row");
    x += law.step(pick);
    path.positions.push_back(x);
  }
  return path;
}

ZEnsemble z_chain_ensemble(const StepLaw& law, const ConeSpec& cone, const HarmonicTables& tables, const IVec& x0,
                           int n_steps, int n_paths, std::uint64_t seed) {
  ZEnsemble out;
  std::vector<double> sum(n_steps + 1, 0.0), sum_sq(n_steps + 1, 0.0);
  for (int i = 0; i < n_paths; ++i) {
    const ZChainPath p = z_chain(law, cone, tables, x0, n_steps, seed, static_cast<std::uint64_t>(i));
    for (double r : p.row_sums) {
      out.min_row_sum = std::min(out.min_row_sum, r);
      out.max_row_sum = std::max(out.max_row_sum, r);
    }
    if (p.truncated) {
      ++out.truncated;
      continue;
    }
    ++out.paths;
    for (int k = 0; k <= n_steps; ++k) {
      const double r = to_real(p.positions[k]).norm();
      sum[k] += r;
      sum_sq[k] += r * r;
    }
  }
  out.mean_norm.resize(n_steps + 1);
  out.se_norm.resize(n_steps + 1);
  const double n = out.paths;
  for (int k = 0; k <= n_steps; ++k) {
    const double m = n > 0 ? sum[k] / n : 0.0;
    const double var = n > 1 ? std::max(0.0, (sum_sq[k] - n * m * m) / (n - 1)) : 0.0;
    out.mean_norm[k] = m;
    out.se_norm[k] = n > 0 ? std::sqrt(var / n) : 0.0;
  }
  return out;
}

}  // namespace conelab
