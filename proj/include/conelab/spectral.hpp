#pragma once

#include <functional>
#include <string>
#include <vector>

#include "conelab/model.hpp"

namespace conelab {

// Killed one-step kernel restricted to K intersected with a window, stored by rows.
struct TruncatedKernel {
  int L = 0;
  Box box;
  std::vector<IVec> states;  // points of K in the window, box order
  std::vector<std::size_t> row_start;
  std::vector<std::size_t> col;  // index into states
  std::vector<double> weight;

  std::size_t size() const { return states.size(); }
  double row_sum(std::size_t i) const;
  // Entries of the row at x as (target, probability); empty if x is not a state.
  std::vector<std::pair<IVec, double>> row(const IVec& x) const;
};

TruncatedKernel truncated_kernel(const StepLaw& law, const ConeSpec& cone, int L);

struct QsdResult {
  int L = 0;
  double lambda = 0.0;
  Grid mu;
  double residual = 0.0;  // TV between mu Q / |mu Q| and mu
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> notes;
};

// Left power iteration on the lazy kernel (I + Q) / 2, which has the same
// Perron vector as Q and does not oscillate when Q is periodic. Stops when
// both the iterate change and the one-step defect of Q are below tol.
QsdResult qsd_power_iteration(const TruncatedKernel& kernel, double tol = 1e-10, int max_iter = 100000);

// Total variation between the normalized restrictions of a and b to the
// points accepted by keep (all points when keep is empty).
double normalized_tv(const Grid& a, const Grid& b, const std::function<bool(const IVec&)>& keep = {});

}  // namespace conelab
