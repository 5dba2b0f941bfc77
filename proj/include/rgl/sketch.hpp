#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rgl/block.hpp"

namespace rgl {

enum class SketchKind { identity, gaussian, sparse_sign };

std::string to_string(SketchKind kind);
/// Accepts "identity", "gaussian", "sparsesign" / "sparse-sign".
std::optional<SketchKind> parse_sketch_kind(std::string_view text);

struct SketchParams {
  SketchKind kind = SketchKind::gaussian;
  std::size_t ell = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t zeta = 8;
  /// Gaussian sketches up to this many bytes are stored; larger ones are
  /// regenerated column by column on every application.
  std::size_t materialize_budget_bytes = std::size_t{256} << 20;
};

/// Sketching map Theta: R^n -> R^ell. Immutable and cheap to copy; the
/// Gaussian entries (when materialized) are shared between copies.
///
/// Column c of the implicit ell-by-n matrix depends only on (seed, kind, c).
/// Gaussian entries are N(0, 1/ell). Sparse-sign columns hold exactly
/// min(zeta, ell) entries of value +-1/sqrt(zeta).
class SketchOperator {
 public:
  explicit SketchOperator(const SketchParams& params);

  SketchKind kind() const noexcept { return params_.kind; }
  std::size_t ell() const noexcept { return params_.ell; }
  std::size_t n() const noexcept { return params_.n; }
  std::uint64_t seed() const noexcept { return params_.seed; }
  std::size_t zeta() const noexcept { return params_.zeta; }
  const SketchParams& params() const noexcept { return params_; }
  bool materialized() const noexcept { return dense_ != nullptr; }

  BlockVector apply(const BlockVector& x) const;
  void apply(const BlockVector& x, BlockVector& out) const;

  /// Dense copy of the implicit matrix; intended for tests and small n.
  Eigen::MatrixXd to_dense() const;

 private:
  void gaussian_column(std::size_t c, std::span<double> out) const;
  void sparse_column(std::size_t c, std::span<std::size_t> rows, std::span<double> vals) const;

  SketchParams params_;
  std::shared_ptr<const std::vector<double>> dense_;
};

SketchOperator make_sketch(SketchKind kind, std::size_t ell, std::size_t n, std::uint64_t seed,
                           std::size_t zeta = 8);

BlockVector apply_sketch(const SketchOperator& theta, const BlockVector& x);

/// <X, Y>_Theta = Trace(X^T Theta^T Theta Y)
double sketched_inner(const SketchOperator& theta, const BlockVector& x, const BlockVector& y);

struct EmbeddingReport {
  double epsilon = 0.0;
  std::size_t dimension = 0;
  std::size_t trials = 1;
  double sigma_min = 1.0;  ///< smallest singular value of Theta*Q
  double sigma_max = 1.0;  ///< largest singular value of Theta*Q
};

/// Distortion of Theta on range(V): with Q an orthonormal basis of range(V),
/// epsilon = max(sigma_max(Theta Q)^2 - 1, 1 - sigma_min(Theta Q)^2).
/// Throws RankError when V is numerically rank deficient (relative 1e-10).
EmbeddingReport estimate_epsilon(const SketchOperator& theta, const BlockVector& v);

/// Orthonormal basis of the numerical range of `v` (column-pivoted QR,
/// columns with |r_ii| <= rel_tol * |r_11| dropped).
BlockVector orthonormal_range(const BlockVector& v, double rel_tol = 1e-10);

}  // namespace rgl
