#include "rgl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "rgl/errors.hpp"

namespace rgl {

namespace {

constexpr double kMaxCondition = 1e14;

double condition_number(const Eigen::MatrixXd& m) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 1.0;
  const double smin = sv(sv.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

std::string closest_pair(const std::vector<double>& lambda) {
  std::size_t bi = 0;
  std::size_t bj = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lambda.size(); ++i)
    for (std::size_t j = i + 1; j < lambda.size(); ++j)
      if (std::abs(lambda[i] - lambda[j]) < best) {
        best = std::abs(lambda[i] - lambda[j]);
        bi = i;
        bj = j;
      }
  std::ostringstream os;
  os.precision(17);
  if (lambda.size() < 2) return "fewer than two eigenvalues";
  os << "closest eigenvalues lambda[" << bi << "] = " << lambda[bi] << " and lambda[" << bj << "] = " << lambda[bj];
  return os.str();
}

}  // namespace

BlockVector residual_space_basis(const SparseMatrix& a, const BlockVector& r0, const BasisSequence& basis,
                                 std::size_t k) {
  if (k > basis.size()) throw ShapeError("residual_space_basis: k exceeds the basis length");
  const std::size_t n = r0.rows();
  const std::size_t s = r0.cols();
  Eigen::MatrixXd stacked(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>((k + 1) * s));
  stacked.leftCols(static_cast<Eigen::Index>(s)) = r0.view();
  for (std::size_t i = 0; i < k; ++i) {
    const BlockVector aq = spmm_block(a, basis[i]);
    stacked.middleCols(static_cast<Eigen::Index>((i + 1) * s), static_cast<Eigen::Index>(s)) = aq.view();
  }
  return orthonormal_range(BlockVector::from_dense(stacked));
}

QuasiOptimality quasi_optimality_ratio(const SparseMatrix& a, const BlockVector& b, const BlockVector& x_gl,
                                       const BlockVector& x_rgl, const SketchOperator& theta,
                                       const BlockVector& span) {
  if (!b.same_shape(x_gl) || !b.same_shape(x_rgl)) throw ShapeError("quasi_optimality: iterate shapes differ from B");
  if (a.n() != b.rows() || span.rows() != b.rows()) throw ShapeError("quasi_optimality: dimension mismatch");

  auto residual_sq = [&](const BlockVector& x) {
    BlockVector r = spmm_block(a, x);
    r.scale(-1.0);
    r.add_scaled(1.0, b);
    const double nr = frob_norm(r);
    return nr * nr;
  };
  QuasiOptimality q;
  const double gl = residual_sq(x_gl);
  const double rgl = residual_sq(x_rgl);
  if (x_gl == x_rgl) {
    q.ratio = 1.0;
  } else if (gl == 0.0) {
    q.ratio = rgl == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  } else {
    q.ratio = rgl / gl;
  }

  q.epsilon_hat = estimate_epsilon(theta, span).epsilon;
  if (q.epsilon_hat >= 1.0) {
    q.applicable = false;
    q.bound = std::numeric_limits<double>::infinity();
  } else {
    q.bound = (1.0 + q.epsilon_hat) / (1.0 - q.epsilon_hat);
  }
  return q;
}

EigenData make_eigen_data(std::span<const double> eigenvalues, const Eigen::MatrixXd& z, const BlockVector& r0) {
  const auto n = static_cast<Eigen::Index>(eigenvalues.size());
  if (z.rows() != n || z.cols() != n) throw ShapeError("eigen data: Z must be n x n with n eigenvalues");
  if (static_cast<Eigen::Index>(r0.rows()) != n) throw ShapeError("eigen data: R0 row count differs from n");
  for (double l : eigenvalues)
    if (!std::isfinite(l)) throw ParameterError("eigen data: non-finite eigenvalue");

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(z);
  const auto& sv = svd.singularValues();
  const double smin = sv(n - 1);
  if (smin == 0.0 || sv(0) / smin >= kMaxCondition) {
    throw ConditioningError("eigen data: eigenvector matrix is numerically singular");
  }

  EigenData eig;
  eig.eigenvalues.assign(eigenvalues.begin(), eigenvalues.end());
  eig.z = z;
  eig.z_norm2 = sv(0);
  eig.beta = z.fullPivLu().solve(r0.view());
  const double scale = r0.view().norm();
  const double defect = (z * eig.beta - r0.view()).norm();
  if (defect > 1e-10 * std::max(scale, std::numeric_limits<double>::min())) {
    throw ConditioningError("eigen data: Z beta does not reproduce R0");
  }
  return eig;
}

EigenData diagonal_eigen_data(std::span<const double> eigenvalues, const BlockVector& r0) {
  const auto n = static_cast<Eigen::Index>(eigenvalues.size());
  if (static_cast<Eigen::Index>(r0.rows()) != n) throw ShapeError("eigen data: R0 row count differs from n");
  EigenData eig;
  eig.eigenvalues.assign(eigenvalues.begin(), eigenvalues.end());
  eig.z = Eigen::MatrixXd::Identity(n, n);
  eig.beta = r0.view();
  eig.z_norm2 = 1.0;
  return eig;
}

double eigen_residual_bound(const EigenData& eig, std::size_t k, double gamma) {
  const std::size_t n = eig.eigenvalues.size();
  if (k + 1 > n) throw ParameterError("eigen_residual_bound: k + 1 must not exceed n");
  if (static_cast<std::size_t>(eig.beta.rows()) != n) throw ShapeError("eigen_residual_bound: beta has wrong row count");
  if (!(gamma >= 1.0)) throw ParameterError("eigen_residual_bound: gamma must be >= 1");

  // M = D^{1/2} V. Columns 1..k are rescaled to unit norm; this leaves
  // e1^T (M^T M)^{-1} e1 unchanged and keeps the factorization well scaled.
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(k + 1);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < rows; ++j) {
    const double d = std::sqrt(eig.beta.row(j).squaredNorm());
    double p = 1.0;
    for (Eigen::Index i = 0; i < cols; ++i) {
      m(j, i) = d * p;
      p *= eig.eigenvalues[static_cast<std::size_t>(j)];
    }
  }
  for (Eigen::Index i = 1; i < cols; ++i) {
    const double nrm = m.col(i).norm();
    if (nrm > 0.0) m.col(i) /= nrm;
  }
  const double cond = condition_number(m);
  if (!(cond * cond < kMaxCondition)) {
    throw ConditioningError("eigen_residual_bound: Vandermonde Gram matrix is numerically singular; " +
                            closest_pair(eig.eigenvalues));
  }

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(cols);
  e1(0) = 1.0;
  // e1^T (R^T R)^{-1} e1 = ||R^{-T} e1||^2
  const Eigen::VectorXd y = r.transpose().triangularView<Eigen::Lower>().solve(e1);
  return gamma * eig.z_norm2 * eig.z_norm2 / y.squaredNorm();
}

}  // namespace rgl
