#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace rgl {

/// Dense n-by-s real block stored column-major, so each right-hand side is a
/// contiguous column.
class BlockVector {
 public:
  BlockVector(std::size_t n, std::size_t s);
  BlockVector(std::size_t n, std::size_t s, std::vector<double> data);

  static BlockVector from_dense(const Eigen::MatrixXd& m);

  std::size_t rows() const noexcept { return n_; }
  std::size_t cols() const noexcept { return s_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(std::size_t i, std::size_t j) const { return data_[j * n_ + i]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[j * n_ + i]; }

  std::span<const double> col(std::size_t j) const { return {data_.data() + j * n_, n_}; }
  std::span<double> col(std::size_t j) { return {data_.data() + j * n_, n_}; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Eigen::Map<const Eigen::MatrixXd> view() const {
    return {data_.data(), static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(s_)};
  }
  Eigen::Map<Eigen::MatrixXd> view() {
    return {data_.data(), static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(s_)};
  }

  bool all_finite() const noexcept;
  bool same_shape(const BlockVector& other) const noexcept {
    return n_ == other.n_ && s_ == other.s_;
  }

  /// this += a * x
  void add_scaled(double a, const BlockVector& x);
  void scale(double a);
  void set_zero();

  friend bool operator==(const BlockVector&, const BlockVector&) = default;

 private:
  std::size_t n_;
  std::size_t s_;
  std::vector<double> data_;
};

/// Square sparse matrix in compressed-row form. Column indices are strictly
/// increasing within each row.
class SparseMatrix {
 public:
  struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
  };

  SparseMatrix(std::size_t n, std::vector<std::size_t> row_ptr,
               std::vector<std::size_t> col_idx, std::vector<double> values);

  /// Duplicate (row, col) pairs are summed.
  static SparseMatrix from_triplets(std::size_t n, std::vector<Triplet> triplets);
  static SparseMatrix identity(std::size_t n);
  static SparseMatrix diagonal(std::span<const double> d);
  /// Entries with |a_ij| == 0 are dropped.
  static SparseMatrix from_dense(const Eigen::MatrixXd& m);

  std::size_t n() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  /// y = A x for a single column.
  void multiply(std::span<const double> x, std::span<double> y) const;

  std::vector<Triplet> triplets() const;
  Eigen::MatrixXd to_dense() const;
  bool is_symmetric() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

/// Ordered list of equally-shaped blocks, optionally paired with their
/// sketches (one l-by-s block per full block).
class BasisSequence {
 public:
  BasisSequence() = default;

  void push_back(BlockVector block);
  void push_back(BlockVector block, BlockVector sketched);

  std::size_t size() const noexcept { return blocks_.size(); }
  bool empty() const noexcept { return blocks_.empty(); }
  bool has_sketches() const noexcept { return !sketched_.empty(); }

  const BlockVector& operator[](std::size_t i) const { return blocks_[i]; }
  const BlockVector& sketched(std::size_t i) const { return sketched_[i]; }
  std::span<const BlockVector> blocks() const noexcept { return blocks_; }
  std::span<const BlockVector> sketched_blocks() const noexcept { return sketched_; }

  /// Drops blocks past `count`.
  void truncate(std::size_t count);

 private:
  std::vector<BlockVector> blocks_;
  std::vector<BlockVector> sketched_;
};

/// Trace(X^T Y), accumulated in long double.
double frob_inner(const BlockVector& x, const BlockVector& y);
double frob_norm(const BlockVector& x);

BlockVector spmm_block(const SparseMatrix& a, const BlockVector& x);
void spmm_block(const SparseMatrix& a, const BlockVector& x, BlockVector& out);

/// sum_i z_i * basis[i]
BlockVector diamond_combine(std::span<const BlockVector> basis, std::span<const double> z);
BlockVector diamond_combine(const BasisSequence& basis, std::span<const double> z);

/// Matrix of pairwise Frobenius products <Y_i, Z_j>_F, i.e. the general
/// diamond product Y^T <> Z.
Eigen::MatrixXd diamond_gram(std::span<const BlockVector> y, std::span<const BlockVector> z);

}  // namespace rgl
