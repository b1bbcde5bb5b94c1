#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "conelab/harmonic.hpp"

namespace conelab {

// Independent stream for (seed, stream index): mt19937_64 seeded through
// std::seed_seq, whose output is fixed by the standard. Uniform variates are
// built from the top 53 bits, so results do not depend on the standard
// library's distribution implementations.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream);
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Inverse-CDF sampler over the support of a step law.
class StepSampler {
 public:
  explicit StepSampler(const StepLaw& law);
  std::size_t sample(StreamRng& rng) const;

 private:
  std::vector<double> cdf_;
};

struct McEstimate {
  std::string estimator;
  double value = 0.0;
  double std_error = 0.0;
  double log_value = 0.0;  // log of value (useful when value underflows)
  std::int64_t n_samples = 0;
  std::int64_t hits = 0;  // surviving paths
  std::uint64_t seed = 0;
  int workers = 1;

  double relative_error() const;
};

struct McOptions {
  std::int64_t n_samples = 1'000'000;
  std::uint64_t seed = 20240601;
  int workers = 1;
};

// Direct estimate of P(tau_x0 > n).
McEstimate mc_survival(const StepLaw& law, const ConeSpec& cone, const IVec& x0, int n, const McOptions& opt);

// c^n E[exp(-h.S~(n)); tau~ > n] under the tilted law.
McEstimate is_survival(const CramerData& cramer, const ConeSpec& cone, const IVec& x0, int n, const McOptions& opt);

struct ZChainPath {
  std::vector<IVec> positions;
  std::vector<double> row_sums;  // raw row sums before normalization
  bool truncated = false;        // aborted on reaching the window edge
  std::string notice;
};

// Conditioned chain with p(x,y) = P(x+X=y) U(y) / (c U(x)), each row
// normalized explicitly.
ZChainPath z_chain(const StepLaw& law, const ConeSpec& cone, const HarmonicTables& tables, const IVec& x0,
                   int n_steps, std::uint64_t seed, std::uint64_t stream = 0);

struct ZEnsemble {
  std::vector<double> mean_norm;  // mean |Z_k| over completed paths, k = 0..n_steps
  std::vector<double> se_norm;
  double min_row_sum = 1.0, max_row_sum = 1.0;
  int paths = 0;
  int truncated = 0;
};

ZEnsemble z_chain_ensemble(const StepLaw& law, const ConeSpec& cone, const HarmonicTables& tables, const IVec& x0,
                           int n_steps, int n_paths, std::uint64_t seed);

}  // namespace conelab
