#include "conelab/lattice.hpp"

#include <numeric>
#include <sstream>
#include <utility>

namespace conelab {

std::string format_point(const IVec& v) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

Box::Box(IVec lo, IVec hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size() || lo_.size() == 0) throw ConfigError("box: bad dimensions");
  const int d = dim();
  stride_.assign(d, 1);
  size_ = 1;
  for (int i = d - 1; i >= 0; --i) {
    if (hi_[i] < lo_[i]) throw ConfigError("box: empty extent");
    stride_[i] = static_cast<std::ptrdiff_t>(size_);
    size_ *= static_cast<std::size_t>(hi_[i] - lo_[i] + 1);
  }
}

bool Box::contains(const IVec& p) const {
  for (int i = 0; i < dim(); ++i)
    if (p[i] < lo_[i] || p[i] > hi_[i]) return false;
  return true;
}

std::size_t Box::index(const IVec& p) const {
  std::ptrdiff_t idx = 0;
  for (int i = 0; i < dim(); ++i) idx += (p[i] - lo_[i]) * stride_[i];
  return static_cast<std::size_t>(idx);
}

IVec Box::point(std::size_t idx) const {
  IVec p(dim());
  auto rest = static_cast<std::ptrdiff_t>(idx);
  for (int i = 0; i < dim(); ++i) {
    p[i] = lo_[i] + static_cast<int>(rest / stride_[i]);
    rest %= stride_[i];
  }
  return p;
}

std::ptrdiff_t Box::offset(const IVec& dz) const {
  std::ptrdiff_t off = 0;
  for (int i = 0; i < dim(); ++i) off += dz[i] * stride_[i];
  return off;
}

double Grid::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

namespace {

using Row = std::vector<std::int64_t>;

void sub_multiple(Row& a, const Row& b, std::int64_t q) {
  for (std::size_t k = 0; k < a.size(); ++k) a[k] -= q * b[k];
}

}  // namespace

SubLattice SubLattice::generated_by(const std::vector<IVec>& generators, int dim) {
  std::vector<Row> rows;
  for (const auto& g : generators) {
    if (g.size() != dim) throw ConfigError("sublattice: generator dimension mismatch");
    Row r(dim);
    for (int k = 0; k < dim; ++k) r[k] = g[k];
    rows.push_back(std::move(r));
  }

  SubLattice out;
  out.dim_ = dim;
  std::size_t top = 0;
  for (int col = 0; col < dim && top < rows.size(); ++col) {
    // Euclid on column `col` among rows [top, end) until one nonzero remains.
    while (true) {
      std::size_t best = rows.size();
      for (std::size_t r = top; r < rows.size(); ++r)
        if (rows[r][col] != 0 && (best == rows.size() || std::llabs(rows[r][col]) < std::llabs(rows[best][col])))
          best = r;
      if (best == rows.size()) break;
      std::swap(rows[top], rows[best]);
      bool reduced = false;
      for (std::size_t r = top + 1; r < rows.size(); ++r) {
        if (rows[r][col] == 0) continue;
        sub_multiple(rows[r], rows[top], rows[r][col] / rows[top][col]);
        reduced = true;
      }
      bool done = true;
      for (std::size_t r = top + 1; r < rows.size(); ++r)
        if (rows[r][col] != 0) done = false;
      if (done) {
        if (rows[top][col] < 0)
          for (auto& v : rows[top]) v = -v;
        IVec b(dim);
        for (int k = 0; k < dim; ++k) b[k] = static_cast<int>(rows[top][k]);
        out.basis_.push_back(b);
        out.pivot_.push_back(col);
        ++top;
        break;
      }
      if (!reduced) break;
    }
  }
  out.rank_ = static_cast<int>(out.basis_.size());
  return out;
}

std::int64_t SubLattice::index() const {
  if (!full_rank()) return 0;
  std::int64_t idx = 1;
  for (std::size_t k = 0; k < basis_.size(); ++k) idx *= basis_[k][pivot_[k]];
  return idx;
}

bool SubLattice::contains(const IVec& v) const {
  if (v.size() != dim_) return false;
  Row r(dim_);
  for (int k = 0; k < dim_; ++k) r[k] = v[k];
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    const int col = pivot_[k];
    // Columns before this pivot must already be cleared.
    for (int j = (k == 0 ? 0 : pivot_[k - 1] + 1); j < col; ++j)
      if (r[j] != 0) return false;
    const std::int64_t piv = basis_[k][col];
    if (r[col] % piv != 0) return false;
    const std::int64_t q = r[col] / piv;
    for (int j = 0; j < dim_; ++j) r[j] -= q * basis_[k][j];
  }
  for (int j = 0; j < dim_; ++j)
    if (r[j] != 0) return false;
  return true;
}

}  // namespace conelab
