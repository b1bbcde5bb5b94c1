#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "conelab/analysis.hpp"
#include "conelab/simulate.hpp"
#include "conelab/spectral.hpp"

namespace conelab::app {

inline const std::vector<std::string> kSelectors{"theorem1", "cor_ratio", "hazard",    "yaglom",
                                                 "exit",     "bridge",    "expmoment", "driftless_bound"};

// Lazily computed objects shared by the commands.
class Pipeline {
 public:
  explicit Pipeline(RunConfig cfg);

  const RunConfig& config() const { return cfg_; }
  const StepLaw& law() const { return law_; }
  const ModelReport& model() const { return model_; }
  const CramerData& cramer();
  const WhiteningData& whitening();
  double p();
  const HarmonicTables& tables();
  HarmonicTables tables_with_window(int L);
  // Rescaled by c from `start` and `second_start`, with the tables the
  // verification selectors need.
  const DpSeries& primary_series();
  const DpSeries& secondary_series();
  const std::vector<DpSeries>& driftless_series();
  std::vector<IVec> driftless_grid() const;
  const QsdResult& qsd(int L);

  VerificationReport verify(const std::string& selector);

 private:
  RunConfig cfg_;
  StepLaw law_;
  ModelReport model_;
  std::optional<CramerData> cramer_;
  std::optional<WhiteningData> white_;
  std::optional<HarmonicTables> tables_;
  std::optional<DpSeries> primary_, secondary_;
  std::optional<std::vector<DpSeries>> driftless_;
  std::map<int, QsdResult> qsd_;
};

struct Invocation {
  std::string command;
  std::string selector;  // verify only
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
};

// Runs one command; returns the process exit status (0 ok, 1 verification
// failed, 2 configuration error, 3 numerical or internal error).
int run(const Invocation& inv, std::ostream& out, std::ostream& err);

}  // namespace conelab::app
