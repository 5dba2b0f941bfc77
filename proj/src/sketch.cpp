#include "rgl/sketch.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "rgl/errors.hpp"
#include "rgl/rng.hpp"

namespace rgl {

std::string to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::identity: return "identity";
    case SketchKind::gaussian: return "gaussian";
    case SketchKind::sparse_sign: return "sparsesign";
  }
  return "unknown";
}

std::optional<SketchKind> parse_sketch_kind(std::string_view text) {
  if (text == "identity") return SketchKind::identity;
  if (text == "gaussian") return SketchKind::gaussian;
  if (text == "sparsesign" || text == "sparse-sign" || text == "sparse_sign") return SketchKind::sparse_sign;
  return std::nullopt;
}

SketchOperator::SketchOperator(const SketchParams& params) : params_(params) {
  if (params_.n == 0) throw ParameterError("sketch: input dimension n must be >= 1");
  if (params_.ell == 0) throw ParameterError("sketch: ell must be >= 1");
  switch (params_.kind) {
    case SketchKind::identity:
      if (params_.ell != params_.n) {
        throw ParameterError("sketch: identity sketch requires ell == n (" + std::to_string(params_.ell) +
                             " != " + std::to_string(params_.n) + ")");
      }
      break;
    case SketchKind::sparse_sign:
      if (params_.zeta == 0) throw ParameterError("sketch: zeta must be >= 1");
      break;
    case SketchKind::gaussian: {
      const std::size_t bytes = params_.ell * params_.n * sizeof(double);
      if (bytes <= params_.materialize_budget_bytes) {
        auto dense = std::make_shared<std::vector<double>>(params_.ell * params_.n);
        for (std::size_t c = 0; c < params_.n; ++c) {
          gaussian_column(c, std::span<double>(dense->data() + c * params_.ell, params_.ell));
        }
        dense_ = std::move(dense);
      }
      break;
    }
  }
}

void SketchOperator::gaussian_column(std::size_t c, std::span<double> out) const {
  KeyedStream stream(params_.seed, kGaussianSketchStream, c);
  const double scale = 1.0 / std::sqrt(static_cast<double>(params_.ell));
  for (double& v : out) v = scale * stream.normal();
}

void SketchOperator::sparse_column(std::size_t c, std::span<std::size_t> rows, std::span<double> vals) const {
  KeyedStream stream(params_.seed, kSparseSignSketchStream, c);
  const std::size_t m = rows.size();
  const std::size_t ell = params_.ell;
  // Floyd's sampling of m distinct rows out of ell.
  std::size_t count = 0;
  for (std::size_t top = ell - m; top < ell; ++top) {
    const auto t = static_cast<std::size_t>(stream.below(top + 1));
    const bool taken = std::find(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(count), t) !=
                       rows.begin() + static_cast<std::ptrdiff_t>(count);
    rows[count++] = taken ? top : t;
  }
  const double mag = 1.0 / std::sqrt(static_cast<double>(params_.zeta));
  for (double& v : vals) v = mag * stream.sign();
}

void SketchOperator::apply(const BlockVector& x, BlockVector& out) const {
  if (x.rows() != params_.n) {
    throw ShapeError("apply_sketch: operator expects " + std::to_string(params_.n) + " rows, block has " +
                     std::to_string(x.rows()));
  }
  if (out.rows() != params_.ell || out.cols() != x.cols()) throw ShapeError("apply_sketch: output shape mismatch");
  const std::size_t n = params_.n;
  const std::size_t ell = params_.ell;
  const std::size_t s = x.cols();

  switch (params_.kind) {
    case SketchKind::identity:
      std::copy(x.data().begin(), x.data().end(), out.data().begin());
      return;

    case SketchKind::gaussian: {
      out.set_zero();
      std::vector<double> scratch(dense_ ? 0 : ell);
      for (std::size_t c = 0; c < n; ++c) {
        const double* theta_c = nullptr;
        if (dense_) {
          theta_c = dense_->data() + c * ell;
        } else {
          gaussian_column(c, scratch);
          theta_c = scratch.data();
        }
        for (std::size_t j = 0; j < s; ++j) {
          const double xcj = x(c, j);
          double* dst = out.col(j).data();
          for (std::size_t r = 0; r < ell; ++r) dst[r] += xcj * theta_c[r];
        }
      }
      return;
    }

    case SketchKind::sparse_sign: {
      out.set_zero();
      const std::size_t m = std::min(params_.zeta, ell);
      std::vector<std::size_t> rows(m);
      std::vector<double> vals(m);
      for (std::size_t c = 0; c < n; ++c) {
        sparse_column(c, rows, vals);
        for (std::size_t j = 0; j < s; ++j) {
          const double xcj = x(c, j);
          double* dst = out.col(j).data();
          for (std::size_t t = 0; t < m; ++t) dst[rows[t]] += vals[t] * xcj;
        }
      }
      return;
    }
  }
}

BlockVector SketchOperator::apply(const BlockVector& x) const {
  if (x.rows() != params_.n) {
    throw ShapeError("apply_sketch: operator expects " + std::to_string(params_.n) + " rows, block has " +
                     std::to_string(x.rows()));
  }
  BlockVector out(params_.ell, x.cols());
  apply(x, out);
  return out;
}

Eigen::MatrixXd SketchOperator::to_dense() const {
  const auto ell = static_cast<Eigen::Index>(params_.ell);
  const auto n = static_cast<Eigen::Index>(params_.n);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(ell, n);
  switch (params_.kind) {
    case SketchKind::identity:
      d.setIdentity();
      break;
    case SketchKind::gaussian: {
      std::vector<double> col(params_.ell);
      for (std::size_t c = 0; c < params_.n; ++c) {
        gaussian_column(c, col);
        for (std::size_t r = 0; r < params_.ell; ++r) d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r];
      }
      break;
    }
    case SketchKind::sparse_sign: {
      const std::size_t m = std::min(params_.zeta, params_.ell);
      std::vector<std::size_t> rows(m);
      std::vector<double> vals(m);
      for (std::size_t c = 0; c < params_.n; ++c) {
        sparse_column(c, rows, vals);
        for (std::size_t t = 0; t < m; ++t)
          d(static_cast<Eigen::Index>(rows[t]), static_cast<Eigen::Index>(c)) = vals[t];
      }
      break;
    }
  }
  return d;
}

SketchOperator make_sketch(SketchKind kind, std::size_t ell, std::size_t n, std::uint64_t seed, std::size_t zeta) {
  SketchParams p;
  p.kind = kind;
  p.ell = ell;
  p.n = n;
  p.seed = seed;
  p.zeta = zeta;
  return SketchOperator(p);
}

BlockVector apply_sketch(const SketchOperator& theta, const BlockVector& x) { return theta.apply(x); }

double sketched_inner(const SketchOperator& theta, const BlockVector& x, const BlockVector& y) {
  if (!x.same_shape(y)) throw ShapeError("sketched_inner: shape mismatch");
  return frob_inner(theta.apply(x), theta.apply(y));
}

BlockVector orthonormal_range(const BlockVector& v, double rel_tol) {
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(v.view());
  const Eigen::MatrixXd r = qr.matrixR().triangularView<Eigen::Upper>();
  const Eigen::Index d = std::min(r.rows(), r.cols());
  const double lead = d > 0 ? std::abs(r(0, 0)) : 0.0;
  Eigen::Index rank = 0;
  while (rank < d && std::abs(r(rank, rank)) > rel_tol * lead) ++rank;
  if (rank == 0) throw RankError("orthonormal_range: block is numerically zero");
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(v.view().rows(), rank);
  return BlockVector::from_dense(q);
}

EmbeddingReport estimate_epsilon(const SketchOperator& theta, const BlockVector& v) {
  if (v.rows() != theta.n()) throw ShapeError("estimate_epsilon: basis row count differs from sketch input dimension");
  const BlockVector q = orthonormal_range(v, 1e-10);
  if (q.cols() < v.cols()) {
    throw RankError("estimate_epsilon: basis has numerical rank " + std::to_string(q.cols()) + " < " +
                    std::to_string(v.cols()) + " columns");
  }
  const BlockVector sq = theta.apply(q);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(sq.view());
  const auto& sv = svd.singularValues();
  EmbeddingReport rep;
  rep.dimension = v.cols();
  rep.sigma_max = sv(0);
  // Fewer sketch rows than basis columns leaves a nontrivial kernel.
  rep.sigma_min = sq.rows() < q.cols() ? 0.0 : sv(sv.size() - 1);
  rep.epsilon = std::max({rep.sigma_max * rep.sigma_max - 1.0, 1.0 - rep.sigma_min * rep.sigma_min, 0.0});
  return rep;
}

}  // namespace rgl
