#include "conelab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "conelab/spectral.hpp"

namespace conelab {

namespace {

std::string str(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double rel_err(double measured, double predicted) { return std::abs(measured / predicted - 1.0); }

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

int top_decade_start(int n_lo, int n_hi) { return std::max(n_lo, n_hi / 10); }

}  // namespace

TailFit fit_tail(const std::vector<double>& b, double r, FitMode mode, int n_lo, int n_hi) {
  if (n_lo < 1) throw ConfigError("fit_tail: n_lo must be at least 1");
  if (n_hi < 4 * n_lo) throw ConfigError("fit_tail: need n_hi >= 4 n_lo");
  if (static_cast<std::size_t>(n_hi) >= b.size()) throw ConfigError("fit_tail: series too short");
  if (!(r > 0.0)) throw ConfigError("fit_tail: rescale factor must be positive");
  for (int n = n_lo; n <= n_hi; ++n)
    if (!(b[n] > 0.0)) throw NumericalError("fit_tail: nonpositive survival at n = " + std::to_string(n));

  TailFit f;
  f.n_lo = n_lo;
  f.n_hi = n_hi;
  const double logr = std::log(r);

  if (mode == FitMode::drifted) {
    const int m = n_hi - n_lo + 1;
    Mat A(m, 4);
    Vec y(m);
    for (int i = 0; i < m; ++i) {
      const double n = n_lo + i;
      A(i, 0) = 1.0;
      A(i, 1) = n;
      A(i, 2) = -std::log(n);
      A(i, 3) = 1.0 / n;
      y[i] = std::log(b[n_lo + i]) + n * logr;
    }
    const Vec coef = A.colPivHouseholderQr().solve(y);
    f.c_hat = std::exp(coef[1]);
    f.diagnostics.push_back("regression exponent " + str(coef[2]));
  } else {
    f.c_hat = 1.0;
  }

  auto e = [&](int m) { return std::log(b[m] / b[2 * m]) / std::log(2.0); };
  const int q = n_hi / 4;
  f.dyadic = {e(q), e(2 * q)};
  f.exponent_hat = 2.0 * f.dyadic[1] - f.dyadic[0];

  const int lo = top_decade_start(n_lo, n_hi);
  double acc = 0.0;
  for (int n = lo; n <= n_hi; ++n) acc += b[n] * std::pow(n, f.exponent_hat);
  f.constant_hat = acc / (n_hi - lo + 1);

  for (int n = n_lo + 1; n <= n_hi; ++n) {
    if (std::log(b[n]) + logr > std::log(b[n - 1]) + 1e-12) {
      f.diagnostics.push_back("survival increases at n = " + std::to_string(n));
      break;
    }
  }
  if (!(f.exponent_hat > 0.0)) f.diagnostics.push_back("nonpositive fitted exponent");
  if (!(f.c_hat > 0.0 && f.c_hat <= 1.0)) f.diagnostics.push_back("fitted rate outside (0, 1]");
  return f;
}

TailFit fit_tail(const DpSeries& s, FitMode mode, int n_lo, int n_hi) {
  if (mode == FitMode::drifted && !s.rescaled()) throw ConfigError("fit_tail: drifted mode needs a rescaled series");
  return fit_tail(s.survival, s.rescale_by, mode, n_lo, n_hi);
}

double fitted_homogeneity_degree(const TailFit& fit, int d) { return fit.exponent_hat - 0.5 * d; }

VerificationReport make_report(std::string name, double predicted, double measured, double deviation,
                               double tolerance, std::vector<std::string> notes) {
  VerificationReport r{std::move(name), predicted, measured, deviation, tolerance, false, std::move(notes)};
  r.pass = deviation <= tolerance;
  return r;
}

VerificationReport verify_theorem1(const DpSeries& sx, const DpSeries& sx2, const HarmonicTables& t, double p,
                                   int d, int n_lo, int n_hi) {
  if (sx.rescale_by != sx2.rescale_by) throw ConfigError("theorem1: rescalings differ");
  const TailFit fit = fit_tail(sx, FitMode::drifted, n_lo, n_hi);
  const double target = p + 0.5 * d;
  const double exp_dev = std::abs(fit.exponent_hat - target);

  auto ratio = [&](int n) { return sx.survival.at(n) / sx2.survival.at(n); };
  const double measured = 2.0 * ratio(n_hi) - ratio(n_hi / 2);
  const double predicted = t.U_at(sx.x0) / t.U_at(sx2.x0);
  if (!(predicted > 0.0)) throw ConfigError("theorem1: start points outside the harmonic table window");
  const double ratio_dev = rel_err(measured, predicted);

  std::vector<std::string> notes{
      "exponent " + str(fit.exponent_hat) + " vs p + d/2 = " + str(target) + " (tolerance " + str(kExponentTol) + ")",
      "plateau ratio " + str(measured) + " vs U ratio " + str(predicted) + " (tolerance " + str(kRatioTol) + ")",
      "deviation is the larger error in units of its tolerance"};
  return make_report("theorem1", predicted, measured, std::max(exp_dev / kExponentTol, ratio_dev / kRatioTol), 1.0,
                     std::move(notes));
}

VerificationReport verify_cor_ratio(const DpSeries& sx, const DpSeries& sy, const HarmonicTables& t, int n) {
  if (sx.rescale_by != sy.rescale_by) throw ConfigError("cor_ratio: rescalings differ");
  const double measured = exit_time_mass(sx, n) / exit_time_mass(sy, n);
  const double predicted = t.U_at(sx.x0) / t.U_at(sy.x0);
  if (!(predicted > 0.0)) throw ConfigError("cor_ratio: start points outside the harmonic table window");
  return make_report("cor_ratio", predicted, measured, rel_err(measured, predicted), kRatioTol,
                     {"n = " + std::to_string(n)});
}

VerificationReport verify_hazard(const DpSeries& s, double c, int n) {
  const double measured = hazard_ratio(s, n);
  const double predicted = (1.0 - c) / c;
  return make_report("hazard", predicted, measured, rel_err(measured, predicted), kRatioTol,
                     {"n = " + std::to_string(n)});
}

VerificationReport verify_yaglom(const DpSeries& s, const StepLaw& law, const Grid& reference, int n) {
  auto tv_at = [&](int m) {
    const ReachableCoset coset(law, s.x0, m);
    return normalized_tv(s.table(m), reference, [&](const IVec& y) { return coset.contains(y); });
  };
  const double tv = tv_at(n);
  const double tv4 = tv_at(n / 4);
  std::vector<std::string> notes{"TV at n = " + std::to_string(n) + ": " + str(tv),
                                 "TV at n = " + std::to_string(n / 4) + ": " + str(tv4)};
  const auto index = difference_lattice(law).index();
  if (index != 1)
    notes.push_back("both laws restricted to the reachable coset (difference lattice index " + std::to_string(index) +
                    ")");
  double deviation = tv;
  if (!(tv < tv4)) {
    deviation = kYaglomTol + tv;
    notes.push_back("TV does not decrease between n/4 and n");
  }
  return make_report("yaglom", 0.0, tv, deviation, kYaglomTol, std::move(notes));
}

VerificationReport verify_exit(const DpSeries& s, const StepLaw& law, const ConeSpec& cone, const HarmonicTables& t,
                               int n) {
  const auto measured = exit_position_law(s, law, cone, n);
  if (measured.empty())
    throw DomainError("exit: no exit mass at tau = " + std::to_string(n) + " (exit times are periodic for this walk)");
  const ReachableCoset coset(law, s.x0, n - 1);
  std::map<std::vector<int>, double> profile;
  for (std::size_t i = 0; i < t.Uprime.box.size(); ++i) {
    const double w = t.Uprime[i];
    if (w == 0.0) continue;
    const IVec z = t.Uprime.box.point(i);
    if (!coset.contains(z)) continue;
    for (std::size_t k = 0; k < law.size(); ++k) {
      const IVec y = z + law.step(k);
      if (cone.contains(y)) continue;
      profile[std::vector<int>(y.data(), y.data() + y.size())] += w * law.prob(k);
    }
  }
  const double tv = normalized_tv(measured, profile);
  std::vector<std::string> notes{"tau = " + std::to_string(n)};
  const auto index = difference_lattice(law).index();
  if (index != 1)
    notes.push_back("profile restricted to the coset reachable at n - 1 (difference lattice index " +
                    std::to_string(index) + ")");
  return make_report("exit", 0.0, tv, tv, kExitTol, std::move(notes));
}

VerificationReport verify_bridge(const DpSeries& sx, const DpSeries& sy, const IVec& z, int n, double p, int d) {
  const int m1 = n / 3, m2 = n / 2;
  const double b1 = bridge_probability(sx, sy, z, m1, n);
  const double b2 = bridge_probability(sx, sy, z, m2, n);
  const double t1 = static_cast<double>(m1) / n, t2 = static_cast<double>(m2) / n;
  const double predicted = std::pow((t1 * (1 - t1)) / (t2 * (1 - t2)), -(p + 0.5 * d));
  const double measured = b1 / b2;
  return make_report("bridge", predicted, measured, rel_err(measured, predicted), kBridgeTol,
                     {"m = " + std::to_string(m1) + ", " + std::to_string(m2) + " of n = " + std::to_string(n),
                      "local decay exponent p + d/2 = " + str(p + 0.5 * d) +
                          (d == 2 ? "" : " (differs from p + 1 when d != 2)")});
}

VerificationReport verify_expmoment(const DpSeries& s, double c, int n_lo, int n_hi) {
  if (n_lo < 1 || n_hi < 4 * n_lo - 1) throw ConfigError("expmoment: need at least two dyadic blocks");
  auto last_ratio = [&](double delta) {
    std::vector<double> blocks;
    for (int a = n_lo; 2 * a - 1 <= n_hi; a *= 2) {
      double sum = 0.0;
      for (int k = a; k < 2 * a; ++k)
        sum += exit_time_mass(s, k) * std::exp(k * (delta + std::log(s.rescale_by)));
      blocks.push_back(sum);
    }
    return blocks[blocks.size() - 1] / blocks[blocks.size() - 2];
  };
  const double delta = -std::log(c);
  const double r0 = last_ratio(delta);
  const double r1 = last_ratio(delta + kExpMomentShift);
  return make_report("expmoment", 0.0, r0, std::max(r0, 1.0 / r1), kExpMomentTol,
                     {"block ratio at delta = -ln c: " + str(r0),
                      "block ratio at delta = -ln c + " + str(kExpMomentShift) + ": " + str(r1)});
}

VerificationReport verify_driftless_bound(const std::vector<DpSeries>& series, const std::vector<double>& xhat_norms,
                                          double p, int n_lo, int n_hi) {
  if (series.empty() || series.size() != xhat_norms.size()) throw ConfigError("driftless_bound: bad start grid");
  const int lo = top_decade_start(n_lo, n_hi);
  std::vector<double> x, y;
  double peak = 0.0;
  for (int n = lo; n <= n_hi; ++n) {
    double stat = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
      const double surv = std::exp(series[i].log_raw_survival(n));
      stat = std::max(stat, surv * std::pow(n, 0.5 * p) / (1.0 + std::pow(xhat_norms[i], p)));
    }
    peak = std::max(peak, stat);
    x.push_back(std::log(static_cast<double>(n)));
    y.push_back(std::log(stat));
  }
  const double sl = slope(x, y);
  return make_report("driftless_bound", 0.0, sl, std::abs(sl), kSlopeTol,
                     {"max statistic " + str(peak) + " over " + std::to_string(series.size()) + " starts, n in [" +
                      std::to_string(lo) + ", " + std::to_string(n_hi) + "]"});
}

double normalized_tv(const std::map<std::vector<int>, double>& a, const std::map<std::vector<int>, double>& b) {
  double sa = 0.0, sb = 0.0;
  for (const auto& [k, v] : a) sa += v;
  for (const auto& [k, v] : b) sb += v;
  if (!(sa > 0.0) || !(sb > 0.0)) throw NumericalError("normalized_tv: a distribution has no mass");
  double tv = 0.0;
  for (const auto& [k, v] : a) {
    const auto it = b.find(k);
    tv += std::abs(v / sa - (it == b.end() ? 0.0 : it->second / sb));
  }
  for (const auto& [k, v] : b)
    if (!a.count(k)) tv += v / sb;
  return 0.5 * tv;
}

}  // namespace conelab
