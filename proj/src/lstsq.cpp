#include "rgl/lstsq.hpp"

#include <cmath>
#include <string>

#include "rgl/errors.hpp"

namespace rgl {

GivensLeastSquares::GivensLeastSquares(double beta) : g_{beta} {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ParameterError("lstsq: beta must be finite and >= 0");
}

void GivensLeastSquares::append_column(std::span<const double> h) {
  const std::size_t j = columns();
  if (h.size() != j + 2) {
    throw ShapeError("lstsq: column " + std::to_string(j) + " needs " + std::to_string(j + 2) + " entries, got " +
                     std::to_string(h.size()));
  }
  std::vector<double> col(h.begin(), h.end());
  for (std::size_t i = 0; i < j; ++i) {
    const double x = col[i];
    const double y = col[i + 1];
    col[i] = cos_[i] * x + sin_[i] * y;
    col[i + 1] = -sin_[i] * x + cos_[i] * y;
  }
  const double x = col[j];
  const double y = col[j + 1];
  const double den = std::hypot(x, y);
  if (den == 0.0) throw RankError("lstsq: column " + std::to_string(j) + " of the Hessenberg matrix reduces to zero");
  const double c = x / den;
  const double s = y / den;
  col[j] = den;
  col.pop_back();

  cos_.push_back(c);
  sin_.push_back(s);
  const double gj = g_[j];
  g_[j] = c * gj;
  g_.push_back(-s * gj);
  r_.push_back(std::move(col));
}

double GivensLeastSquares::residual() const noexcept { return std::abs(g_.back()); }

std::vector<double> GivensLeastSquares::solve(std::size_t count) const {
  if (count > columns()) throw ShapeError("lstsq: requested more columns than appended");
  std::vector<double> z(count, 0.0);
  for (std::size_t ii = count; ii-- > 0;) {
    double acc = g_[ii];
    for (std::size_t k = ii + 1; k < count; ++k) acc -= r_[k][ii] * z[k];
    z[ii] = acc / r_[ii][ii];
  }
  return z;
}

LstsqSolution hessenberg_lstsq(const HessenbergFactor& hess, double beta) {
  if (hess.entries.rows() != static_cast<Eigen::Index>(hess.k + 1) ||
      hess.entries.cols() != static_cast<Eigen::Index>(hess.k)) {
    throw ShapeError("lstsq: Hessenberg factor has inconsistent dimensions");
  }
  for (Eigen::Index j = 0; j < hess.entries.cols(); ++j)
    for (Eigen::Index i = j + 2; i < hess.entries.rows(); ++i)
      if (hess.entries(i, j) != 0.0) throw ParameterError("lstsq: matrix is not upper Hessenberg");
  GivensLeastSquares ls(beta);
  for (std::size_t j = 0; j < hess.k; ++j) ls.append_column(hess.column(j));
  return {ls.solve(), ls.residual()};
}

}  // namespace rgl
