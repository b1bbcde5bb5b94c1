#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace conelab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using IVec = Eigen::VectorXi;

// Error categories. The CLI maps ConfigError to status 2 and the rest to 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A step law or cone that violates one of the standing model assumptions.
struct ModelRejected : ConfigError {
  using ConfigError::ConfigError;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Truncation window too small for the requested accuracy.
struct WindowTooSmall : NumericalError {
  WindowTooSmall(const std::string& what, int suggested)
      : NumericalError(what), suggested_window(suggested) {}
  int suggested_window;
};

inline Vec to_real(const IVec& v) { return v.cast<double>(); }

std::string format_point(const IVec& v);

// Dense axis-aligned box of lattice points [lo, hi] (inclusive), row-major
// with the last coordinate fastest.
class Box {
 public:
  Box() = default;
  Box(IVec lo, IVec hi);

  int dim() const { return static_cast<int>(lo_.size()); }
  const IVec& lo() const { return lo_; }
  const IVec& hi() const { return hi_; }
  std::size_t size() const { return size_; }

  bool contains(const IVec& p) const;
  std::size_t index(const IVec& p) const;
  IVec point(std::size_t idx) const;
  // Flat-index offset of a displacement. Only meaningful when both ends
  // are in the box.
  std::ptrdiff_t offset(const IVec& dz) const;

  bool operator==(const Box& o) const { return lo_ == o.lo_ && hi_ == o.hi_; }

 private:
  IVec lo_, hi_;
  std::vector<std::ptrdiff_t> stride_;
  std::size_t size_ = 0;
};

// Scalar field stored densely over a Box.
struct Grid {
  Box box;
  std::vector<double> values;

  Grid() = default;
  explicit Grid(Box b, double fill = 0.0) : box(std::move(b)), values(box.size(), fill) {}

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  double at(const IVec& p) const { return box.contains(p) ? values[box.index(p)] : 0.0; }
  double sum() const;
};

// Sublattice of Z^d given by a basis in column Hermite normal form.
// Used for the period structure of a walk: positions after n steps lie in
// x0 + n*z0 + G where G is generated by differences of support vectors.
class SubLattice {
 public:
  // Lattice generated by the columns of `generators` (d x m, m may exceed d).
  static SubLattice generated_by(const std::vector<IVec>& generators, int dim);

  int dim() const { return dim_; }
  bool full_rank() const { return rank_ == dim_; }
  // Index [Z^d : G]; 0 when G is not full rank.
  std::int64_t index() const;
  bool contains(const IVec& v) const;
  const std::vector<IVec>& basis() const { return basis_; }

 private:
  int dim_ = 0;
  int rank_ = 0;
  // Echelon basis: basis_[k] has its first nonzero entry (positive) at
  // pivot_[k], pivots strictly increasing.
  std::vector<IVec> basis_;
  std::vector<int> pivot_;
};

}  // namespace conelab
