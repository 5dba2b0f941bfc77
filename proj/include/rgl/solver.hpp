#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rgl/arnoldi.hpp"
#include "rgl/block.hpp"
#include "rgl/sketch.hpp"
#include "rgl/timing.hpp"

namespace rgl {

struct SketchConfig {
  SketchKind kind = SketchKind::gaussian;
  std::size_t ell = 0;
  std::uint64_t seed = 0;
  std::size_t zeta = 8;
};

struct SolverConfig {
  std::size_t maxit = 500;
  /// Stop when the (sketched, for RGl) residual norm drops below
  /// tol times its initial value.
  double tol = 1e-6;
  std::optional<SketchConfig> sketch;
  /// Recompute ||B - A X_k||_F every this many steps; 0 means only at the end.
  std::size_t true_residual_cadence = 0;
  double breakdown_tol = 1e-14;
  std::size_t memory_budget_bytes = std::size_t{4} << 30;
  bool reorthogonalize = false;
  /// RGl only: flag the run when the true relative residual exceeds
  /// divergence_factor * tol after sketched convergence.
  double divergence_factor = 10.0;
  /// Keep the Krylov basis and Hessenberg factor in the result.
  bool retain_basis = false;
};

struct TrueResidualSample {
  std::size_t iteration = 0;
  double residual = 0.0;
};

struct SolveReport {
  std::string method;  ///< "gl" or "rgl"
  std::size_t iterations = 0;
  bool converged = false;
  std::optional<std::size_t> breakdown_step;
  /// Entry k is the least-squares residual after k steps; entry 0 is beta.
  /// Equals ||R_k||_F for Gl and ||Theta R_k||_F for RGl.
  std::vector<double> ls_residual_history;
  std::vector<TrueResidualSample> true_residual_history;
  double initial_residual = 0.0;  ///< ||R_0||_F
  double beta = 0.0;              ///< ||R_0||_F, or ||Theta R_0||_F for RGl
  double true_residual_final = 0.0;
  double relative_residual_final = 0.0;  ///< true_residual_final / ||R_0||_F
  bool sketch_divergence = false;
  PhaseTimes times;
  /// Time spent on intermediate true-residual checks (not part of `times`).
  double residual_check_seconds = 0.0;
  /// Cumulative phase time after setup (index 0) and after each step.
  std::vector<double> elapsed_seconds;
  std::optional<SketchKind> sketch_kind;
  std::size_t ell = 0;
  std::optional<std::uint64_t> seed;
};

struct SolveResult {
  BlockVector x;
  SolveReport report;
  std::optional<ArnoldiResult> krylov;
};

/// Gl-GMRES: X_k = X_0 + V_k <> z with z minimizing ||beta e1 - Hbar_k z||,
/// beta = ||R_0||_F. Throws ResourceError, NumericalFailure.
SolveResult gl_gmres(const SparseMatrix& a, const BlockVector& b, const BlockVector& x0, const SolverConfig& cfg);

/// RGl-GMRES with the sketch described by cfg.sketch (required).
SolveResult rgl_gmres(const SparseMatrix& a, const BlockVector& b, const BlockVector& x0, const SolverConfig& cfg);
/// RGl-GMRES with an explicit sketch operator; cfg.sketch is ignored.
SolveResult rgl_gmres(const SparseMatrix& a, const BlockVector& b, const BlockVector& x0, const SolverConfig& cfg,
                      const SketchOperator& theta);

/// B - A X
BlockVector residual_block(const SparseMatrix& a, const BlockVector& b, const BlockVector& x);

}  // namespace rgl
