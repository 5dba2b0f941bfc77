#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rgl/arnoldi.hpp"

namespace rgl {

/// Progressive solution of min_z || beta e1 - Hbar_k z ||_2 for a growing
/// upper Hessenberg matrix. Each appended column is reduced with the stored
/// Givens rotations plus one new rotation, so the residual after every step
/// is available in O(k) work.
class GivensLeastSquares {
 public:
  explicit GivensLeastSquares(double beta);

  /// `h` holds the j+2 leading entries of column j (0-based). Throws RankError
  /// if the column reduces to zero.
  void append_column(std::span<const double> h);

  std::size_t columns() const noexcept { return cos_.size(); }
  /// Minimum of || beta e1 - Hbar z || over the columns appended so far.
  double residual() const noexcept;
  /// Minimizer using the first `count` columns (default: all of them).
  std::vector<double> solve(std::size_t count) const;
  std::vector<double> solve() const { return solve(columns()); }

 private:
  // Upper-triangular factor stored by columns; column j has j+1 entries.
  std::vector<std::vector<double>> r_;
  std::vector<double> cos_;
  std::vector<double> sin_;
  std::vector<double> g_;
};

struct LstsqSolution {
  std::vector<double> z;
  double residual = 0.0;
};

LstsqSolution hessenberg_lstsq(const HessenbergFactor& hess, double beta);

}  // namespace rgl
