#include "rgl/block.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rgl/errors.hpp"

namespace rgl {

namespace {

std::string shape_str(std::size_t n, std::size_t s) {
  return std::to_string(n) + "x" + std::to_string(s);
}

void require_same_shape(const BlockVector& x, const BlockVector& y, const char* op) {
  if (!x.same_shape(y)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(x.rows(), x.cols()) +
                     " vs " + shape_str(y.rows(), y.cols()));
  }
}

// Four independent long double accumulators keep the x87 pipeline busy.
long double dot_wide(const double* a, const double* b, std::size_t len) {
  long double s0 = 0.0L, s1 = 0.0L, s2 = 0.0L, s3 = 0.0L;
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    s0 += static_cast<long double>(a[i]) * b[i];
    s1 += static_cast<long double>(a[i + 1]) * b[i + 1];
    s2 += static_cast<long double>(a[i + 2]) * b[i + 2];
    s3 += static_cast<long double>(a[i + 3]) * b[i + 3];
  }
  for (; i < len; ++i) s0 += static_cast<long double>(a[i]) * b[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

// ---------------------------------------------------------------------------
// BlockVector

BlockVector::BlockVector(std::size_t n, std::size_t s) : n_(n), s_(s), data_(n * s, 0.0) {
  if (n == 0 || s == 0) throw ShapeError("BlockVector: dimensions must be >= 1, got " + shape_str(n, s));
}

BlockVector::BlockVector(std::size_t n, std::size_t s, std::vector<double> data)
    : n_(n), s_(s), data_(std::move(data)) {
  if (n == 0 || s == 0) throw ShapeError("BlockVector: dimensions must be >= 1, got " + shape_str(n, s));
  if (data_.size() != n * s) {
    throw ShapeError("BlockVector: expected " + std::to_string(n * s) + " entries, got " +
                     std::to_string(data_.size()));
  }
  if (!all_finite()) throw ParameterError("BlockVector: non-finite entry");
}

BlockVector BlockVector::from_dense(const Eigen::MatrixXd& m) {
  BlockVector out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  out.view() = m;
  if (!out.all_finite()) throw ParameterError("BlockVector: non-finite entry");
  return out;
}

bool BlockVector::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void BlockVector::add_scaled(double a, const BlockVector& x) {
  require_same_shape(*this, x, "add_scaled");
  const double* src = x.data_.data();
  double* dst = data_.data();
  const std::size_t len = data_.size();
  for (std::size_t i = 0; i < len; ++i) dst[i] += a * src[i];
}

void BlockVector::scale(double a) {
  for (double& v : data_) v *= a;
}

void BlockVector::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

// ---------------------------------------------------------------------------
// SparseMatrix

SparseMatrix::SparseMatrix(std::size_t n, std::vector<std::size_t> row_ptr,
                           std::vector<std::size_t> col_idx, std::vector<double> values)
    : n_(n), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values)) {
  if (n_ == 0) throw ShapeError("SparseMatrix: dimension must be >= 1");
  if (row_ptr_.size() != n_ + 1 || row_ptr_.front() != 0) {
    throw ShapeError("SparseMatrix: row pointer array must have n+1 entries starting at 0");
  }
  if (col_idx_.size() != values_.size() || row_ptr_.back() != values_.size()) {
    throw ShapeError("SparseMatrix: index/value arrays disagree with row pointers");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (row_ptr_[i] > row_ptr_[i + 1]) throw ShapeError("SparseMatrix: row pointers decrease");
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (col_idx_[p] >= n_) {
        throw ShapeError("SparseMatrix: column index " + std::to_string(col_idx_[p]) +
                         " out of range in row " + std::to_string(i));
      }
      if (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1]) {
        throw ShapeError("SparseMatrix: column indices not strictly increasing in row " +
                         std::to_string(i));
      }
      if (!std::isfinite(values_[p])) throw ParameterError("SparseMatrix: non-finite value");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t n, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= n || t.col >= n) throw ShapeError("SparseMatrix: triplet index out of range");
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  cols.reserve(triplets.size());
  vals.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const auto& t = triplets[k];
    if (k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
      vals.back() += t.value;
      continue;
    }
    cols.push_back(t.col);
    vals.push_back(t.value);
    ++row_ptr[t.row + 1];
  }
  for (std::size_t i = 0; i < n; ++i) row_ptr[i + 1] += row_ptr[i];
  return SparseMatrix(n, std::move(row_ptr), std::move(cols), std::move(vals));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<double> ones(n, 1.0);
  return diagonal(ones);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> d) {
  const std::size_t n = d.size();
  std::vector<std::size_t> row_ptr(n + 1), cols(n);
  for (std::size_t i = 0; i < n; ++i) {
    row_ptr[i + 1] = i + 1;
    cols[i] = i;
  }
  return SparseMatrix(n, std::move(row_ptr), std::move(cols), std::vector<double>(d.begin(), d.end()));
}

SparseMatrix SparseMatrix::from_dense(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ShapeError("SparseMatrix: dense source must be square");
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double v = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v != 0.0) t.push_back({i, j, v});
    }
  return from_triplets(n, std::move(t));
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_ || y.size() != n_) throw ShapeError("SparseMatrix::multiply: length mismatch");
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) acc += values_[p] * x[col_idx_[p]];
    y[i] = acc;
  }
}

std::vector<SparseMatrix::Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) out.push_back({i, col_idx_[p], values_[p]});
  return out;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  for (const auto& t : triplets())
    d(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) = t.value;
  return d;
}

bool SparseMatrix::is_symmetric() const {
  auto lookup = [this](std::size_t i, std::size_t j, double& v) {
    const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return false;
    v = values_[static_cast<std::size_t>(it - col_idx_.begin())];
    return true;
  };
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      double v = 0.0;
      if (!lookup(col_idx_[p], i, v) || v != values_[p]) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// BasisSequence

void BasisSequence::push_back(BlockVector block) {
  if (has_sketches()) throw ShapeError("BasisSequence: sketched basis requires a sketched block");
  if (!blocks_.empty() && !blocks_.front().same_shape(block)) {
    throw ShapeError("BasisSequence: block shape differs from the first block");
  }
  blocks_.push_back(std::move(block));
}

void BasisSequence::push_back(BlockVector block, BlockVector sketched) {
  if (!blocks_.empty() && !has_sketches()) {
    throw ShapeError("BasisSequence: cannot add sketches to an unsketched basis");
  }
  if (!blocks_.empty() && (!blocks_.front().same_shape(block) || !sketched_.front().same_shape(sketched))) {
    throw ShapeError("BasisSequence: block shape differs from the first block");
  }
  if (sketched.cols() != block.cols()) throw ShapeError("BasisSequence: sketch column count differs");
  blocks_.push_back(std::move(block));
  sketched_.push_back(std::move(sketched));
}

void BasisSequence::truncate(std::size_t count) {
  if (count < blocks_.size()) blocks_.erase(blocks_.begin() + static_cast<std::ptrdiff_t>(count), blocks_.end());
  if (count < sketched_.size())
    sketched_.erase(sketched_.begin() + static_cast<std::ptrdiff_t>(count), sketched_.end());
}

// ---------------------------------------------------------------------------
// Free functions

double frob_inner(const BlockVector& x, const BlockVector& y) {
  require_same_shape(x, y, "frob_inner");
  return static_cast<double>(dot_wide(x.data().data(), y.data().data(), x.size()));
}

double frob_norm(const BlockVector& x) {
  const double* p = x.data().data();
  return static_cast<double>(std::sqrt(dot_wide(p, p, x.size())));
}

void spmm_block(const SparseMatrix& a, const BlockVector& x, BlockVector& out) {
  if (a.n() != x.rows()) {
    throw ShapeError("spmm_block: matrix is " + std::to_string(a.n()) + "x" + std::to_string(a.n()) +
                     " but block has " + std::to_string(x.rows()) + " rows");
  }
  if (!out.same_shape(x)) throw ShapeError("spmm_block: output shape mismatch");
  for (std::size_t j = 0; j < x.cols(); ++j) a.multiply(x.col(j), out.col(j));
}

BlockVector spmm_block(const SparseMatrix& a, const BlockVector& x) {
  if (a.n() != x.rows()) {
    throw ShapeError("spmm_block: matrix is " + std::to_string(a.n()) + "x" + std::to_string(a.n()) +
                     " but block has " + std::to_string(x.rows()) + " rows");
  }
  BlockVector out(x.rows(), x.cols());
  spmm_block(a, x, out);
  return out;
}

BlockVector diamond_combine(std::span<const BlockVector> basis, std::span<const double> z) {
  if (basis.empty()) throw ShapeError("diamond_combine: empty basis");
  if (z.size() != basis.size()) {
    throw ShapeError("diamond_combine: " + std::to_string(z.size()) + " coefficients for " +
                     std::to_string(basis.size()) + " blocks");
  }
  BlockVector out(basis.front().rows(), basis.front().cols());
  for (std::size_t i = 0; i < basis.size(); ++i) out.add_scaled(z[i], basis[i]);
  return out;
}

BlockVector diamond_combine(const BasisSequence& basis, std::span<const double> z) {
  return diamond_combine(basis.blocks(), z);
}

Eigen::MatrixXd diamond_gram(std::span<const BlockVector> y, std::span<const BlockVector> z) {
  Eigen::MatrixXd g(static_cast<Eigen::Index>(y.size()), static_cast<Eigen::Index>(z.size()));
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < z.size(); ++j)
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = frob_inner(y[i], z[j]);
  return g;
}

}  // namespace rgl
