#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conelab/harmonic.hpp"
#include "conelab/whiten.hpp"

namespace conelab::app {

struct SimulateConfig {
  int n = 60;
  std::int64_t n_samples = 1'000'000;
  int z_steps = 200;
  int z_paths = 1000;
  int z_window = 100;
};

struct QsdConfig {
  std::vector<int> windows{20, 30, 40, 60};
  double tol = 1e-10;
  int max_iter = 100000;
};

struct VerifyConfig {
  int n_lo = 50;
  int n_hi = 300;
  int driftless_window = 120;
  std::vector<IVec> driftless_grid;  // empty: {1..5} x {1..4} (x {1}...) inside K
};

struct RunConfig {
  std::string name = "run";
  std::vector<IVec> steps;
  std::vector<double> probs;
  ConeSpec cone = ConeSpec::orthant(2);
  WhiteningMode whitening = WhiteningMode::general;
  IVec start;
  IVec second_start;
  int window = 60;  // DP and QSD window
  int n_max = 400;
  HarmonicOptions harmonic;
  SimulateConfig simulate;
  QsdConfig qsd;
  VerifyConfig verify;
  std::uint64_t seed = 20240601;
  int workers = 1;
  std::string output = "out";

  StepLaw law() const { return StepLaw(steps, probs); }
};

// Exact rational "p/q", integer, or decimal string.
double parse_probability(const std::string& text);

// Throws ConfigError naming the offending key.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path, std::string* raw_text = nullptr);

}  // namespace conelab::app
