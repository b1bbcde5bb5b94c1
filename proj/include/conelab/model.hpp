#pragma once

#include <string>
#include <variant>
#include <vector>

#include "conelab/lattice.hpp"

namespace conelab {

// Finite lattice step distribution: the law of one jump X.
class StepLaw {
 public:
  StepLaw() = default;
  // Validates: d >= 1, equal dimensions, distinct steps, positive
  // probabilities summing to 1 within 1e-12.
  StepLaw(std::vector<IVec> support, std::vector<double> probs);

  int dim() const { return dim_; }
  std::size_t size() const { return support_.size(); }
  const IVec& step(std::size_t i) const { return support_[i]; }
  double prob(std::size_t i) const { return probs_[i]; }
  const std::vector<IVec>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }

  Vec mean() const;
  // Second-moment matrix E[X X^T].
  Mat second_moment() const;
  // Largest sup-norm of a support vector.
  int max_step() const;
  // Law of -X.
  StepLaw negated() const;
  // Probability of the exact step z (0 when z is not in the support).
  double prob_of(const IVec& z) const;

 private:
  int dim_ = 0;
  std::vector<IVec> support_;
  std::vector<double> probs_;
};

struct Orthant {
  int dim;
};
struct Wedge2d {
  double opening;   // beta, radians
  double rotation;  // theta0: direction of the first boundary ray
};
struct HalfSpace {
  Vec normal;  // K = {x : normal . x > 0}
};

// Open cone K.
class ConeSpec {
 public:
  using Variant = std::variant<Orthant, Wedge2d, HalfSpace>;

  static ConeSpec orthant(int d);
  static ConeSpec wedge2d(double opening, double rotation);
  static ConeSpec halfspace(Vec normal);

  int dim() const;
  const Variant& variant() const { return v_; }
  bool is_orthant() const { return std::holds_alternative<Orthant>(v_); }
  bool is_wedge() const { return std::holds_alternative<Wedge2d>(v_); }
  bool is_halfspace() const { return std::holds_alternative<HalfSpace>(v_); }
  std::string describe() const;

  // Membership in the open cone. Lattice points on the boundary are
  // outside; the orthant test is exact on integer input.
  bool contains(const IVec& x) const;
  bool contains(const Vec& x) const;

  // Bounding box of K intersected with the sup-norm ball of radius L.
  Box window(int L) const;

 private:
  explicit ConeSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

struct ConeGeometry {
  bool inside;
  double boundary_distance;
};

ConeGeometry cone_geometry(const ConeSpec& cone, const Vec& x);

enum class Aperiodicity { verified, inconclusive };

struct ModelReport {
  Vec drift;
  bool noncollinear = false;
  Aperiodicity aperiodicity = Aperiodicity::inconclusive;
  // Index of the lattice generated by step differences (1 = strongly
  // aperiodic, 2 = period two, 0 = not full rank).
  std::int64_t difference_lattice_index = 0;
  std::vector<std::string> notes;
};

// Radius of the residue box filled by the aperiodicity scan.
inline constexpr int kAperiodicityBox = 8;

ModelReport build_model(const StepLaw& law, const ConeSpec& cone);

struct Assumption5Result {
  bool ok;
  double worst_angle;
  std::string note;
};

inline constexpr double kAngleTolerance = 1e-9;

Assumption5Result check_assumption5(const ConeSpec& cone, const Vec& h);

// Difference lattice G of a law; positions after n steps from x0 lie in
// x0 + n*z0 + G.
SubLattice difference_lattice(const StepLaw& law);

// Predicate for the coset reachable at time n from x0.
class ReachableCoset {
 public:
  ReachableCoset(const StepLaw& law, IVec x0, int n);
  bool contains(const IVec& y) const;

 private:
  SubLattice lattice_;
  IVec base_;
};

}  // namespace conelab
