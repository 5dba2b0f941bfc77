#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rgl/block.hpp"
#include "rgl/sketch.hpp"
#include "rgl/timing.hpp"

namespace rgl {

/// (k+1)-by-k upper Hessenberg coefficient matrix built column by column.
struct HessenbergFactor {
  std::size_t k = 0;
  Eigen::MatrixXd entries;  ///< (k+1) x k, zero below the first subdiagonal

  double operator()(std::size_t i, std::size_t j) const {
    return entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  /// Column j (0-based) truncated to its j+2 structurally nonzero entries.
  std::vector<double> column(std::size_t j) const;
};

struct ArnoldiResult {
  BasisSequence basis;  ///< k+1 blocks, or k after a breakdown at step k
  HessenbergFactor hess;
  double beta = 0.0;  ///< ||R0||_F, or ||Theta R0||_F for the sketched process
  std::optional<std::size_t> breakdown_step;  ///< 1-based step with vanishing subdiagonal
};

struct ArnoldiOptions {
  /// Breakdown when h_{j+1,j} <= breakdown_tol * ||A V_j|| (sketched norm
  /// for the randomized process).
  double breakdown_tol = 1e-14;
  /// Second Gram-Schmidt pass per step.
  bool reorthogonalize = false;
  /// Upper bound on bytes held by basis blocks and their sketches.
  std::size_t memory_budget_bytes = std::size_t{4} << 30;
};

/// Incremental global Arnoldi process. Without a sketch, blocks are
/// F-orthonormal (modified Gram-Schmidt in the Frobenius inner product). With
/// a sketch Theta, blocks are orthonormal in <Theta X, Theta Y>_F, and the
/// sketches S_j = Theta Q_j are carried along and updated with the same
/// coefficients.
class GlobalArnoldi {
 public:
  GlobalArnoldi(const SparseMatrix& a, const BlockVector& r0, const SketchOperator* theta,
                const ArnoldiOptions& options, PhaseTimes* times = nullptr);

  /// Performs one step. Returns the new Hessenberg column (length j+2 for
  /// the (j+1)-th step). After a breakdown no new block is appended and the
  /// subdiagonal entry of the returned column is exactly zero.
  std::span<const double> step();

  std::size_t steps() const noexcept { return columns_.size(); }
  bool broke_down() const noexcept { return breakdown_step_.has_value(); }
  std::optional<std::size_t> breakdown_step() const noexcept { return breakdown_step_; }
  double beta() const noexcept { return beta_; }
  const BasisSequence& basis() const noexcept { return basis_; }
  bool sketched() const noexcept { return theta_ != nullptr; }

  HessenbergFactor hessenberg() const;
  /// Moves the accumulated state out; the process is unusable afterwards.
  ArnoldiResult release() &&;

 private:
  void check_budget(std::size_t blocks, std::size_t cols) const;

  const SparseMatrix& a_;
  const SketchOperator* theta_;
  ArnoldiOptions options_;
  PhaseTimes* times_;
  BasisSequence basis_;
  std::vector<std::vector<double>> columns_;
  double beta_ = 0.0;
  std::optional<std::size_t> breakdown_step_;
};

/// Gl-Arnoldi: k steps of global Arnoldi with F-orthonormal blocks.
ArnoldiResult gl_arnoldi(const SparseMatrix& a, const BlockVector& r0, std::size_t k,
                         const ArnoldiOptions& options = {});

/// RGl-Arnoldi: k steps with Theta-orthonormal blocks.
ArnoldiResult rgl_arnoldi(const SparseMatrix& a, const BlockVector& r0, std::size_t k,
                          const SketchOperator& theta, const ArnoldiOptions& options = {});

}  // namespace rgl
