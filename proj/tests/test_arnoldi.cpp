#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rgl/arnoldi.hpp"
#include "rgl/errors.hpp"

using namespace rgl;

namespace {

double max_gram_defect(const Eigen::MatrixXd& g) {
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

// max_j ||A V_j - sum_i h_ij V_i||_F / ||A V_j||_F
double arnoldi_defect(const SparseMatrix& a, const ArnoldiResult& r) {
  double worst = 0.0;
  for (std::size_t j = 0; j < r.hess.k; ++j) {
    BlockVector w = spmm_block(a, r.basis[j]);
    const double ref = frob_norm(w);
    for (std::size_t i = 0; i <= j + 1 && i < r.basis.size(); ++i) w.add_scaled(-r.hess(i, j), r.basis[i]);
    worst = std::max(worst, frob_norm(w) / ref);
  }
  return worst;
}

}  // namespace

TEST_CASE("invariant subspace gives breakdown at step 1") {
  const auto r0 = oracle::random_block(10, 2, 1);
  const auto r = gl_arnoldi(SparseMatrix::identity(10), r0, 3);
  REQUIRE(r.breakdown_step.has_value());
  CHECK(*r.breakdown_step == 1);
  CHECK(r.hess.k == 1);
  CHECK(r.basis.size() == 1);
  CHECK(r.hess(0, 0) == doctest::Approx(1.0));
  CHECK(r.hess(1, 0) == 0.0);

  const auto t = make_sketch(SketchKind::gaussian, 8, 10, 3);
  const auto rr = rgl_arnoldi(SparseMatrix::identity(10), r0, 3, t);
  REQUIRE(rr.breakdown_step.has_value());
  CHECK(*rr.breakdown_step == 1);
}

TEST_CASE("two-by-two hand example") {
  const std::vector<double> d{1, 2};
  const auto r = gl_arnoldi(SparseMatrix::diagonal(d), BlockVector(2, 1, {1, 1}), 1);
  const double h = 1.0 / std::sqrt(2.0);
  CHECK(r.basis[0](0, 0) == doctest::Approx(h));
  CHECK(r.basis[0](1, 0) == doctest::Approx(h));
  CHECK(r.hess(0, 0) == doctest::Approx(1.5));
  CHECK(r.hess(1, 0) == doctest::Approx(0.5));
  CHECK(r.basis[1](0, 0) == doctest::Approx(-h));
  CHECK(r.basis[1](1, 0) == doctest::Approx(h));
  CHECK(r.beta == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("Gl-Arnoldi orthogonality, Arnoldi relation and Hessenberg structure") {
  const auto a = oracle::random_sparse(100, 0.05, 7);
  const auto r0 = oracle::random_block(100, 4, 8);
  const auto r = gl_arnoldi(a, r0, 10);
  REQUIRE(r.basis.size() == 11);
  CHECK(max_gram_defect(diamond_gram(r.basis.blocks(), r.basis.blocks())) <= 1e-10);
  CHECK(arnoldi_defect(a, r) <= 1e-10);
  for (Eigen::Index j = 0; j < r.hess.entries.cols(); ++j) {
    CHECK(r.hess.entries(j + 1, j) >= 0.0);
    for (Eigen::Index i = j + 2; i < r.hess.entries.rows(); ++i) CHECK(r.hess.entries(i, j) == 0.0);
  }
  // V_1 = R0 / ||R0||_F
  BlockVector v1 = r0;
  v1.scale(1.0 / frob_norm(r0));
  CHECK(frob_norm([&] { BlockVector d = r.basis[0]; d.add_scaled(-1.0, v1); return d; }()) <= 1e-15);
}

TEST_CASE("RGl-Arnoldi sketched orthogonality and carried sketches") {
  const auto a = oracle::random_sparse(300, 0.02, 9);
  const auto r0 = oracle::random_block(300, 3, 10);
  const auto t = make_sketch(SketchKind::gaussian, 120, 300, 11);
  const auto r = rgl_arnoldi(a, r0, 15, t);
  REQUIRE(r.basis.size() == 16);
  REQUIRE(r.basis.has_sketches());
  CHECK(max_gram_defect(diamond_gram(r.basis.sketched_blocks(), r.basis.sketched_blocks())) <= 1e-8);
  for (std::size_t j = 0; j < r.basis.size(); ++j) {
    BlockVector d = apply_sketch(t, r.basis[j]);
    d.add_scaled(-1.0, r.basis.sketched(j));
    CHECK(frob_norm(d) <= 1e-10 * frob_norm(r.basis.sketched(j)));
  }
  CHECK(arnoldi_defect(a, r) <= 1e-10);
  CHECK(r.beta == doctest::Approx(frob_norm(apply_sketch(t, r0))).epsilon(1e-14));
}

TEST_CASE("identity sketch reproduces Gl-Arnoldi bit for bit") {
  const auto a = oracle::random_sparse(60, 0.1, 12);
  const auto r0 = oracle::random_block(60, 2, 13);
  const auto g = gl_arnoldi(a, r0, 12);
  const auto r = rgl_arnoldi(a, r0, 12, make_sketch(SketchKind::identity, 60, 60, 0));
  CHECK(g.beta == r.beta);
  CHECK(g.hess.entries == r.hess.entries);
  for (std::size_t j = 0; j < g.basis.size(); ++j) CHECK(g.basis[j] == r.basis[j]);
}

TEST_CASE("basis blocks lie in the global Krylov space") {
  const auto a = oracle::random_sparse(40, 0.15, 14);
  const auto r0 = oracle::random_block(40, 2, 15);
  const auto r = gl_arnoldi(a, r0, 6);
  const Eigen::MatrixXd ad = oracle::dense(a);
  Eigen::MatrixXd kry(80, 7);
  Eigen::MatrixXd p = oracle::dense(r0);
  for (int i = 0; i < 7; ++i) {
    Eigen::VectorXd c = oracle::vec(p);
    kry.col(i) = c / c.norm();
    p = ad * Eigen::Map<Eigen::MatrixXd>(kry.col(i).data(), 40, 2);
  }
  for (int j = 0; j < 7; ++j) {
    const Eigen::VectorXd v = oracle::vec(oracle::dense(r.basis[static_cast<std::size_t>(j)]));
    const Eigen::MatrixXd kj = kry.leftCols(j + 1);
    const Eigen::VectorXd c = kj.colPivHouseholderQr().solve(v);
    CHECK((v - kj * c).norm() <= 1e-8 * v.norm());
  }
}

TEST_CASE("scaling the start block scales only beta") {
  const auto a = oracle::random_sparse(50, 0.1, 16);
  const auto r0 = oracle::random_block(50, 3, 17);
  BlockVector r1 = r0;
  r1.scale(3.7);
  for (bool sketched : {false, true}) {
    const auto t = make_sketch(SketchKind::gaussian, 40, 50, 18);
    const auto x = sketched ? rgl_arnoldi(a, r0, 8, t) : gl_arnoldi(a, r0, 8);
    const auto y = sketched ? rgl_arnoldi(a, r1, 8, t) : gl_arnoldi(a, r1, 8);
    CHECK(y.beta == doctest::Approx(3.7 * x.beta).epsilon(1e-12));
    CHECK((x.hess.entries - y.hess.entries).cwiseAbs().maxCoeff() <= 1e-12 * x.hess.entries.cwiseAbs().maxCoeff());
    for (std::size_t j = 0; j < x.basis.size(); ++j) {
      BlockVector d = x.basis[j];
      d.add_scaled(-1.0, y.basis[j]);
      CHECK(frob_norm(d) <= 1e-12 * frob_norm(x.basis[j]));
    }
  }
}

TEST_CASE("singular values of the sketched-orthonormal basis") {
  const auto a = oracle::random_sparse(200, 0.05, 19);
  const auto r0 = oracle::random_block(200, 3, 20);
  const auto t = make_sketch(SketchKind::gaussian, 600, 200, 21);
  const auto r = rgl_arnoldi(a, r0, 5, t);
  Eigen::MatrixXd cols(200, 18);
  for (int j = 0; j < 6; ++j) {
    cols.middleCols(3 * j, 3) = oracle::dense(r.basis[static_cast<std::size_t>(j)]);
  }
  const double eps = estimate_epsilon(t, BlockVector::from_dense(cols)).epsilon;
  REQUIRE(eps < 1.0);
  // vectorized blocks: columns are vec(Q_j) in R^{n s}; their sketches are orthonormal
  Eigen::MatrixXd q(600, 6);
  for (int j = 0; j < 6; ++j) q.col(j) = oracle::vec(oracle::dense(r.basis[static_cast<std::size_t>(j)]));
  const auto sv = Eigen::JacobiSVD<Eigen::MatrixXd>(q).singularValues();
  CHECK(sv(5) >= 1.0 / std::sqrt(1.0 + eps) * (1 - 1e-10));
  CHECK(sv(0) <= 1.0 / std::sqrt(1.0 - eps) * (1 + 1e-10));
}

TEST_CASE("error conditions") {
  const auto a = oracle::random_sparse(20, 0.2, 22);
  CHECK_THROWS_AS(gl_arnoldi(a, BlockVector(20, 2), 3), DegenerateInputError);
  CHECK_THROWS_AS(gl_arnoldi(a, oracle::random_block(20, 2, 1), 0), ParameterError);
  CHECK_THROWS_AS(gl_arnoldi(a, oracle::random_block(19, 2, 1), 2), ShapeError);

  // A one-row sign sketch annihilates r0 = theta_1 e_0 - theta_0 e_1.
  const auto t = make_sketch(SketchKind::sparse_sign, 1, 20, 5, 1);
  const Eigen::MatrixXd td = t.to_dense();
  BlockVector r0(20, 1);
  r0(0, 0) = td(0, 1);
  r0(1, 0) = -td(0, 0);
  CHECK_THROWS_AS(rgl_arnoldi(a, r0, 3, t), SemiNormDegeneracyError);

  ArnoldiOptions tight;
  tight.memory_budget_bytes = 20 * 2 * 8 * 3;
  CHECK_THROWS_AS(gl_arnoldi(a, oracle::random_block(20, 2, 2), 10, tight), ResourceError);
}
