#pragma once

// Dense reference computations used by the tests. They deliberately avoid
// the library's own kernels (no Givens recurrence, no global Arnoldi) so a
// bug in the library cannot cancel out in the comparison.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "rgl/block.hpp"

namespace oracle {

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = nd(gen);
  return m;
}

inline rgl::BlockVector random_block(std::size_t n, std::size_t s, std::uint64_t seed) {
  return rgl::BlockVector::from_dense(
      gaussian_matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(s), seed));
}

/// Sparse matrix with roughly `density * n^2` off-diagonal Gaussian entries
/// scaled by 1/sqrt(n * density) plus `shift` on the diagonal.
inline rgl::SparseMatrix random_sparse(std::size_t n, double density, std::uint64_t seed, double shift = 2.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> nd(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(std::max(1.0, static_cast<double>(n) * density));
  std::vector<rgl::SparseMatrix::Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, shift + 0.5 * nd(gen)});
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && u(gen) < density) t.push_back({i, j, scale * nd(gen)});
  }
  return rgl::SparseMatrix::from_triplets(n, std::move(t));
}

/// Densify straight from the CSR arrays.
inline Eigen::MatrixXd dense(const rgl::SparseMatrix& a) {
  const auto n = static_cast<Eigen::Index>(a.n());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto v = a.values();
  for (std::size_t r = 0; r < a.n(); ++r)
    for (std::size_t p = rp[r]; p < rp[r + 1]; ++p) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(ci[p])) = v[p];
  return m;
}

inline Eigen::MatrixXd dense(const rgl::BlockVector& x) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(x.rows()), static_cast<Eigen::Index>(x.cols()));
  for (std::size_t j = 0; j < x.cols(); ++j)
    for (std::size_t i = 0; i < x.rows(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x(i, j);
  return m;
}

inline Eigen::VectorXd vec(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

/// min over Z in K_k(A, R0) of ||R0 - A Z||_F, via dense least squares on the
/// vectorized (column-normalized) monomial basis {vec(A^i R0)}.
inline double krylov_min_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& r0, int k) {
  const Eigen::VectorXd rhs = vec(r0);
  Eigen::MatrixXd basis(rhs.size(), k);
  Eigen::MatrixXd p = r0;
  for (int i = 0; i < k; ++i) {
    p = a * p;
    Eigen::VectorXd c = vec(p);
    c /= c.norm();
    basis.col(i) = c;
    p = Eigen::Map<const Eigen::MatrixXd>(c.data(), r0.rows(), r0.cols());
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
  const Eigen::VectorXd coef = qr.solve(rhs);
  return (rhs - basis * coef).norm();
}

/// Residual-norm history of textbook single-vector GMRES (dense Arnoldi with
/// two classical Gram-Schmidt passes, least squares by QR at every step).
inline std::vector<double> vector_gmres_history(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                                const Eigen::VectorXd& x0, int steps) {
  const Eigen::VectorXd r0 = b - a * x0;
  const double beta = r0.norm();
  const auto n = a.rows();
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, steps + 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(steps + 1, steps);
  v.col(0) = r0 / beta;
  std::vector<double> hist{beta};
  for (int j = 0; j < steps; ++j) {
    Eigen::VectorXd w = a * v.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd c = v.leftCols(j + 1).transpose() * w;
      w -= v.leftCols(j + 1) * c;
      h.col(j).head(j + 1) += c;
    }
    h(j + 1, j) = w.norm();
    if (h(j + 1, j) > 0) v.col(j + 1) = w / h(j + 1, j);
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(j + 2);
    e1(0) = beta;
    const Eigen::MatrixXd hj = h.topLeftCorner(j + 2, j + 1);
    const Eigen::VectorXd y = hj.colPivHouseholderQr().solve(e1);
    hist.push_back((e1 - hj * y).norm());
  }
  return hist;
}

inline double rel_diff(double a, double b) {
  const double s = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / s;
}

}  // namespace oracle
