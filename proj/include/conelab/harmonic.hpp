#pragma once

#include <string>
#include <vector>

#include "conelab/cramer.hpp"
#include "conelab/whiten.hpp"

namespace conelab {

// Positive harmonic function of the whitened cone, zero on its boundary and
// homogeneous of degree p. Normalized to the closed forms below.
struct ContinuousHarmonic {
  enum class Kind { wedge2d, orthant_product, halfline };
  Kind kind = Kind::wedge2d;
  double p = 1.0;
  double theta1 = 0.0;  // wedge2d: first boundary ray of the image wedge
  Vec normal;           // halfline: normal of the image half-space

  static ContinuousHarmonic for_image(const ConeImage& image, double p);
};

// u(x) for x in the closed image cone; DomainError outside it.
double u_eval(const ContinuousHarmonic& u, const Vec& x);

struct HarmonicOptions {
  int window = 60;  // sup-norm radius of the table window, lattice index units
  int max_iter = 5000;
  double tol = 1e-6;  // relative sup-change over the inner half-window
};

// Tables indexed by original lattice coordinates y, holding V(My) etc.
struct HarmonicTables {
  Box box;
  Mat M;
  ContinuousHarmonic u;
  Grid V, Vprime;
  int iterations_V = 0, iterations_Vprime = 0;
  double residual_V = 0.0, residual_Vprime = 0.0;
  bool converged = false;
  double growth_constant = 0.0;  // max V / (1 + |My|^p) over the window

  // Filled by build_U_tables.
  Vec h;
  double c = 0.0;
  Grid U, Uprime;
  double kappa = 0.0;
  double tail_bound = 0.0;

  std::vector<std::string> notes;

  bool in_window(const IVec& y) const { return box.contains(y); }
  double V_at(const IVec& y) const { return V.at(y); }
  double Vprime_at(const IVec& y) const { return Vprime.at(y); }
  double U_at(const IVec& y) const { return U.at(y); }
  double Uprime_at(const IVec& y) const { return Uprime.at(y); }
};

// Killed-expectation iteration V <- E[V(y + X~); y + X~ in K], started from
// u(My), on the window with payoff u(My) collected when the walk leaves the
// window inside K. V' uses the reversed steps.
HarmonicTables build_V_tables(const StepLaw& tilted, const ConeSpec& cone, const Mat& M,
                              const ContinuousHarmonic& u, const HarmonicOptions& opt = {});

// U(y) = exp(h.y) V(My), U'(y) = exp(-h.y) V'(My) and kappa = 1 / sum U'.
// Throws WindowTooSmall when the geometric bound on the U' mass outside the
// window exceeds 1e-8 / kappa.
HarmonicTables build_U_tables(HarmonicTables tables, const Vec& h, double c, double worst_angle);

// Whole pipeline from a validated model.
HarmonicTables build_harmonic_tables(const ConeSpec& cone, const CramerData& cramer, const WhiteningData& white,
                                     const HarmonicOptions& opt = {});

// |sum_z p(z) f(y+z) [y+z in K] - scale * f(y)| / (scale * f(y)) for a table f.
double harmonic_residual(const Grid& f, const StepLaw& law, const ConeSpec& cone, const IVec& y, double scale = 1.0);

}  // namespace conelab
