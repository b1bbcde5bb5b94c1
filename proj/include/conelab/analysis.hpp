#pragma once

#include <string>
#include <vector>

#include "conelab/dp_oracle.hpp"
#include "conelab/harmonic.hpp"

namespace conelab {

// Tolerances of the limit checks.
inline constexpr double kRatioTol = 0.02;
inline constexpr double kExponentTol = 0.15;
inline constexpr double kYaglomTol = 0.02;
inline constexpr double kExitTol = 0.02;
inline constexpr double kBridgeTol = 0.05;
inline constexpr double kSlopeTol = 0.05;
inline constexpr double kExpMomentTol = 0.95;
inline constexpr double kExpMomentShift = 0.05;

enum class FitMode { drifted, driftless };

struct TailFit {
  double c_hat = 0.0;
  double exponent_hat = 0.0;
  double constant_hat = 0.0;
  int n_lo = 0, n_hi = 0;
  std::vector<double> dyadic;  // e(m) = log2(b_m / b_2m) for m = n_hi/4, n_hi/2
  std::vector<std::string> diagnostics;
};

// b: series b_n = P(tau > n) / r^n for n = 0..N. Drifted mode fits
// log P(tau > n) = A + n log c - s log n + B / n over [n_lo, n_hi] for c_hat;
// driftless mode fixes c_hat = 1. The exponent is one Richardson step on the
// dyadic slopes 2 e(n_hi/2) - e(n_hi/4), and the constant is the mean of
// b_n n^s over the top decade.
TailFit fit_tail(const std::vector<double>& b, double rescale_by, FitMode mode, int n_lo, int n_hi);
TailFit fit_tail(const DpSeries& s, FitMode mode, int n_lo, int n_hi);

// Homogeneity degree read off a drifted tail fit: exponent - d/2.
double fitted_homogeneity_degree(const TailFit& fit, int d);

struct VerificationReport {
  std::string check_name;
  double predicted = 0.0;
  double measured = 0.0;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<std::string> notes;
};

// Sets pass = deviation <= tolerance.
VerificationReport make_report(std::string name, double predicted, double measured, double deviation,
                               double tolerance, std::vector<std::string> notes = {});

// Survival series from two starts x, x' (same rescaling). Exponent of the
// normalized series vs p + d/2 (tolerance kExponentTol) and the
// extrapolated ratio b_n(x)/b_n(x') vs U(x)/U(x') (kRatioTol). The reported
// deviation is the larger of the two errors, each divided by its tolerance.
VerificationReport verify_theorem1(const DpSeries& sx, const DpSeries& sx2, const HarmonicTables& t, double p,
                                   int d, int n_lo, int n_hi);

// P_x(tau = n) / P_y(tau = n) vs U(x) / U(y).
VerificationReport verify_cor_ratio(const DpSeries& sx, const DpSeries& sy, const HarmonicTables& t, int n);

// P(tau = n) / P(tau > n) vs (1 - c) / c.
VerificationReport verify_hazard(const DpSeries& s, double c, int n);

// TV between the conditional law at n (table needed at n and n/4) and the
// reference, both restricted to the coset of points reachable at time n.
// Also requires TV(n) < TV(n/4).
VerificationReport verify_yaglom(const DpSeries& s, const StepLaw& law, const Grid& reference, int n);

// Conditional exit position at tau = n vs the normalized profile
// sum_z U'(z) P(z + X = y), with z restricted to the coset reachable at n-1.
VerificationReport verify_exit(const DpSeries& s, const StepLaw& law, const ConeSpec& cone, const HarmonicTables& t,
                               int n);

// Ratio of bridge probabilities at m = n/3 and m = n/2 vs
// ((1/3 * 2/3) / (1/4))^-(p + d/2). sx needs tables at n/3, n/2, n; sy at
// n - n/3 and n - n/2.
VerificationReport verify_bridge(const DpSeries& sx, const DpSeries& sy, const IVec& z, int n, double p, int d);

// Dyadic block sums of exp(delta k) P(tau = k) over [n_lo, n_hi]: the last
// block ratio must be below 1 at delta = -ln c and above 1 at
// delta = -ln c + kExpMomentShift.
VerificationReport verify_expmoment(const DpSeries& s, double c, int n_lo, int n_hi);

// Driftless series from a grid of starts with their whitened norms |x^|:
// max over x of P(tau > n) n^(p/2) / (1 + |x^|^p), log-log slope over the
// top decade of [n_lo, n_hi].
VerificationReport verify_driftless_bound(const std::vector<DpSeries>& series, const std::vector<double>& xhat_norms,
                                          double p, int n_lo, int n_hi);

// Total variation between two normalized point masses keyed by position.
double normalized_tv(const std::map<std::vector<int>, double>& a, const std::map<std::vector<int>, double>& b);

}  // namespace conelab
