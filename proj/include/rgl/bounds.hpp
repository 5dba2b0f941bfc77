#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rgl/block.hpp"
#include "rgl/sketch.hpp"

namespace rgl {

struct QuasiOptimality {
  double ratio = 1.0;        ///< ||B - A X_rgl||_F^2 / ||B - A X_gl||_F^2
  double bound = 1.0;        ///< (1 + eps) / (1 - eps), +inf when not applicable
  double epsilon_hat = 0.0;  ///< distortion of Theta measured on `span`
  bool applicable = true;    ///< false when epsilon_hat >= 1 (semi-norm regime)
};

/// Orthonormal basis of span{columns of R0} + span{columns of A Q_i, i < k}.
/// Dependent columns are dropped, so the result always has full rank.
BlockVector residual_space_basis(const SparseMatrix& a, const BlockVector& r0, const BasisSequence& basis,
                                 std::size_t k);

/// Compares the residuals of two iterates built from the same k, X0 and
/// Krylov data. epsilon_hat is measured with estimate_epsilon on `span`
/// (typically residual_space_basis). epsilon_hat >= 1 is reported through
/// `applicable`, not thrown.
QuasiOptimality quasi_optimality_ratio(const SparseMatrix& a, const BlockVector& b, const BlockVector& x_gl,
                                       const BlockVector& x_rgl, const SketchOperator& theta,
                                       const BlockVector& span);

/// Eigen-decomposition A = Z diag(lambda) Z^{-1} and the coordinates of R0
/// in the eigenvector basis (Z beta = R0).
struct EigenData {
  std::vector<double> eigenvalues;
  Eigen::MatrixXd z;
  Eigen::MatrixXd beta;  ///< n x s
  double z_norm2 = 1.0;  ///< spectral norm of Z
};

/// Throws ConditioningError when Z is numerically singular (condition
/// number >= 1e14) or Z beta does not reproduce R0 to 1e-10 relative.
EigenData make_eigen_data(std::span<const double> eigenvalues, const Eigen::MatrixXd& z, const BlockVector& r0);
/// Z = I, beta = R0.
EigenData diagonal_eigen_data(std::span<const double> eigenvalues, const BlockVector& r0);

/// gamma * ||Z||_2^2 / (e1^T (V^T D V)^{-1} e1), with V the n x (k+1)
/// Vandermonde matrix in the eigenvalues and D_jj = sum_i beta_j^(i)^2.
/// Throws ConditioningError (naming the closest eigenvalue pair) when the
/// Gram matrix has condition number >= 1e14.
double eigen_residual_bound(const EigenData& eig, std::size_t k, double gamma = 1.0);

}  // namespace rgl
