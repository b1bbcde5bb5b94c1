#pragma once

#include <map>
#include <vector>

#include "conelab/cramer.hpp"

namespace conelab {

struct DpOptions {
  int window = 60;
  double rescale_by = 1.0;
  // Times at which the full measure is kept.
  std::vector<int> retain;
  bool retain_all = false;
  // Tolerated mass leaving the window inside K, relative to b_n.
  double edge_tol = 1e-12;
};

// Exact evolution of the killed measure q~(n)(x0, .) = q(n)(x0, .) / r^n.
struct DpSeries {
  IVec x0;
  int n_max = 0;
  double rescale_by = 1.0;
  Box box;
  std::vector<double> survival;  // b_n = P(tau > n) / r^n
  double max_edge_ratio = 0.0;   // largest per-step window leak / b_n
  std::map<int, Grid> tables;

  bool rescaled() const { return rescale_by != 1.0; }
  // log P(tau > n).
  double log_raw_survival(int n) const;
  const Grid& table(int n) const;
};

DpSeries dp_evolve(const StepLaw& law, const ConeSpec& cone, const IVec& x0, int n_max, const DpOptions& opt = {});

// P(tau = n) / r^n.
double exit_time_mass(const DpSeries& s, int n);
// log P(tau = n).
double log_exit_time_probability(const DpSeries& s, int n);
// P(tau = n) / P(tau > n).
double hazard_ratio(const DpSeries& s, int n);

// Exit-position law at time n, rescaled by r^(n-1): y -> sum_z q~(n-1)(x0,z) P(z+X=y)
// over exit points y outside K. Needs the table at n - 1.
std::map<std::vector<int>, double> exit_position_law(const DpSeries& s, const StepLaw& law, const ConeSpec& cone,
                                                    int n);

// P(x + S(m) = y | tau > n, x + S(n) = z) from a series started at x (tables
// at m and n) and one started at y (table at n - m). Rescalings must match.
double bridge_probability(const DpSeries& from_x, const DpSeries& from_y, const IVec& z, int m, int n);

// max over n <= n_max and y of |q~(n)(x0,y) - exp(h.(x0-y)) d(n)(x0,y)|,
// evolving the original law rescaled by c against the tilted law.
double check_identity_h12(const StepLaw& law, const CramerData& cramer, const ConeSpec& cone, const IVec& x0,
                          int n_max, int window = 60);

struct HalfspaceReduction {
  StepLaw projected;  // law of a.X
  double c1 = 0.0;    // min_t E[exp(t a.X)]
  double t_star = 0.0;
  DpSeries series;    // killed on leaving (0, inf), rescaled by c1
};

HalfspaceReduction halfspace_1d(const StepLaw& law, const Vec& normal, int x0_height, int n_max, int window = 200);

}  // namespace conelab
