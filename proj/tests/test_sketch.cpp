#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rgl/errors.hpp"
#include "rgl/sketch.hpp"

using namespace rgl;

namespace {

Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) { return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues(); }

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(make_sketch(SketchKind::gaussian, 0, 10, 1), ParameterError);
  CHECK_THROWS_AS(make_sketch(SketchKind::identity, 5, 10, 1), ParameterError);
  CHECK_THROWS_AS(make_sketch(SketchKind::sparse_sign, 4, 10, 1, 0), ParameterError);
  CHECK_NOTHROW(make_sketch(SketchKind::gaussian, 40, 10, 1));  // oversampled sketches are allowed
  const auto t = make_sketch(SketchKind::gaussian, 4, 10, 1);
  CHECK_THROWS_AS(apply_sketch(t, BlockVector(11, 1)), ShapeError);
}

TEST_CASE("kind names round-trip") {
  for (auto k : {SketchKind::identity, SketchKind::gaussian, SketchKind::sparse_sign})
    CHECK(parse_sketch_kind(to_string(k)) == k);
  CHECK(parse_sketch_kind("sparse-sign") == SketchKind::sparse_sign);
  CHECK_FALSE(parse_sketch_kind("srht").has_value());
}

TEST_CASE("identity sketch is exact") {
  const auto x = oracle::random_block(30, 3, 1);
  const auto y = oracle::random_block(30, 3, 2);
  const auto t = make_sketch(SketchKind::identity, 30, 30, 9);
  CHECK(apply_sketch(t, x) == x);
  CHECK(sketched_inner(t, x, y) == frob_inner(x, y));
  CHECK(estimate_epsilon(t, x).epsilon <= 1e-12);
}

TEST_CASE("sparse-sign column structure") {
  const auto t = make_sketch(SketchKind::sparse_sign, 8, 100, 3, 4);
  const Eigen::MatrixXd d = t.to_dense();
  for (Eigen::Index c = 0; c < d.cols(); ++c) {
    int nnz = 0;
    for (Eigen::Index r = 0; r < d.rows(); ++r) {
      if (d(r, c) != 0.0) {
        ++nnz;
        CHECK(std::abs(d(r, c)) == 0.5);
      }
    }
    CHECK(nnz == 4);
  }
  // zeta > ell: every row is hit, magnitude still 1/sqrt(zeta)
  const Eigen::MatrixXd e = make_sketch(SketchKind::sparse_sign, 3, 20, 3, 9).to_dense();
  for (Eigen::Index c = 0; c < e.cols(); ++c)
    for (Eigen::Index r = 0; r < e.rows(); ++r) CHECK(std::abs(e(r, c)) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("gaussian sketch preserves squared norms in expectation") {
  Eigen::VectorXd v = oracle::gaussian_matrix(50, 1, 77);
  v /= v.norm();
  const auto x = BlockVector::from_dense(v);
  double mean = 0.0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    const auto sx = apply_sketch(make_sketch(SketchKind::gaussian, 200, 50, 1000 + t), x);
    mean += frob_inner(sx, sx);
  }
  mean /= trials;
  CHECK(std::abs(mean - 1.0) <= 0.05);
}

TEST_CASE("apply_sketch is linear and matches its dense form") {
  for (auto kind : {SketchKind::gaussian, SketchKind::sparse_sign}) {
    const auto t = make_sketch(kind, 64, 256, 5);
    const auto x = oracle::random_block(256, 3, 11);
    const auto y = oracle::random_block(256, 3, 12);
    BlockVector comb = x;
    comb.scale(1.5);
    comb.add_scaled(-0.25, y);
    const Eigen::MatrixXd lhs = oracle::dense(apply_sketch(t, comb));
    const Eigen::MatrixXd rhs = 1.5 * oracle::dense(apply_sketch(t, x)) - 0.25 * oracle::dense(apply_sketch(t, y));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * rhs.cwiseAbs().maxCoeff());
    const Eigen::MatrixXd ref = t.to_dense() * oracle::dense(x);
    CHECK((oracle::dense(apply_sketch(t, x)) - ref).norm() <= 1e-13 * ref.norm());
    CHECK(frob_norm(apply_sketch(t, BlockVector(256, 3))) == 0.0);
  }
}

TEST_CASE("sketches are deterministic and storage independent") {
  const auto x = oracle::random_block(120, 4, 3);
  for (auto kind : {SketchKind::gaussian, SketchKind::sparse_sign}) {
    const auto a = make_sketch(kind, 40, 120, 42);
    const auto b = make_sketch(kind, 40, 120, 42);
    CHECK(apply_sketch(a, x) == apply_sketch(b, x));
    CHECK(apply_sketch(a, x) == apply_sketch(a, x));
    CHECK_FALSE(apply_sketch(a, x) == apply_sketch(make_sketch(kind, 40, 120, 43), x));
  }
  SketchParams p{SketchKind::gaussian, 40, 120, 42};
  const SketchOperator stored(p);
  p.materialize_budget_bytes = 0;
  const SketchOperator streamed(p);
  CHECK(stored.materialized());
  CHECK_FALSE(streamed.materialized());
  CHECK(apply_sketch(stored, x) == apply_sketch(streamed, x));
}

TEST_CASE("sketched inner product is the composition of sketch and Frobenius product") {
  const auto t = make_sketch(SketchKind::gaussian, 30, 90, 8);
  const auto x = oracle::random_block(90, 2, 21);
  const auto y = oracle::random_block(90, 2, 22);
  const double ref = frob_inner(apply_sketch(t, x), apply_sketch(t, y));
  CHECK(std::abs(sketched_inner(t, x, y) - ref) <= 1e-13 * frob_norm(apply_sketch(t, x)) * frob_norm(apply_sketch(t, y)));
  CHECK(sketched_inner(t, x, BlockVector(90, 2)) == 0.0);
}

TEST_CASE("estimate_epsilon") {
  SUBCASE("one-dimensional subspace") {
    Eigen::VectorXd v = oracle::gaussian_matrix(60, 1, 5);
    v /= v.norm();
    const auto t = make_sketch(SketchKind::gaussian, 60, 60, 17);
    const auto sv = apply_sketch(t, BlockVector::from_dense(v));
    const double expect = std::abs(frob_inner(sv, sv) - 1.0);
    CHECK(estimate_epsilon(t, BlockVector::from_dense(v)).epsilon == doctest::Approx(expect).epsilon(1e-10));
  }
  SUBCASE("rank deficiency is rejected") {
    Eigen::MatrixXd v = oracle::gaussian_matrix(40, 3, 6);
    v.col(2) = 2.0 * v.col(0) - v.col(1);
    CHECK_THROWS_AS(estimate_epsilon(make_sketch(SketchKind::gaussian, 20, 40, 1), BlockVector::from_dense(v)),
                    RankError);
  }
  SUBCASE("bounds brute-force distortion over random pairs") {
    const auto v = oracle::random_block(200, 5, 31);
    const auto t = make_sketch(SketchKind::gaussian, 2000, 200, 4);
    const double eps = estimate_epsilon(t, v).epsilon;
    CHECK(eps < 0.25);
    const Eigen::MatrixXd vd = oracle::dense(v);
    const Eigen::MatrixXd tv = t.to_dense() * vd;
    std::mt19937_64 gen(99);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int p = 0; p < 10000; ++p) {
      Eigen::VectorXd a(5);
      Eigen::VectorXd b(5);
      for (int i = 0; i < 5; ++i) {
        a(i) = nd(gen);
        b(i) = nd(gen);
      }
      const Eigen::VectorXd x = vd * a;
      const Eigen::VectorXd y = vd * b;
      const double d = std::abs(x.dot(y) - (tv * a).dot(tv * b)) / (x.norm() * y.norm());
      worst = std::max(worst, d);
    }
    CHECK(worst <= eps + 1e-10);
  }
}

TEST_CASE("Frobenius extension and norm sandwich") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto x = oracle::random_block(150, 3, 100 + seed);
    const auto y = oracle::random_block(150, 3, 200 + seed);
    const auto t = make_sketch(seed % 2 == 0 ? SketchKind::gaussian : SketchKind::sparse_sign, 300, 150, seed);
    Eigen::MatrixXd joint(150, 6);
    joint << oracle::dense(x), oracle::dense(y);
    const double eps = estimate_epsilon(t, BlockVector::from_dense(joint)).epsilon;
    CHECK(std::abs(frob_inner(x, y) - sketched_inner(t, x, y)) <= eps * frob_norm(x) * frob_norm(y) + 1e-10);

    // V X with V = x (150 x 3) and random 3 x 2 coefficient blocks X
    const double ev = estimate_epsilon(t, x).epsilon;
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::MatrixXd vx = oracle::dense(x) * oracle::gaussian_matrix(3, 2, 1000 * seed + trial);
      const auto b = BlockVector::from_dense(vx);
      const double n2 = frob_inner(b, b);
      const double s2 = sketched_inner(t, b, b);
      CHECK((1 - ev) * n2 <= s2 + 1e-10 * n2);
      CHECK(s2 <= (1 + ev) * n2 + 1e-10 * n2);
    }
  }
}

TEST_CASE("singular value sandwich on tall matrices") {
  int applicable = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::MatrixXd v = oracle::gaussian_matrix(120, 4, 500 + seed) *
                              oracle::gaussian_matrix(4, 4, 600 + seed);  // arbitrary conditioning
    const auto t = make_sketch(SketchKind::gaussian, 80, 120, seed);
    const double eps = estimate_epsilon(t, BlockVector::from_dense(v)).epsilon;
    if (eps >= 1.0) continue;
    ++applicable;
    const auto sv = singular_values(v);
    const auto tsv = singular_values(t.to_dense() * v);
    CHECK(tsv(3) / std::sqrt(1 + eps) <= sv(3) * (1 + 1e-10));
    CHECK(sv(0) <= tsv(0) / std::sqrt(1 - eps) * (1 + 1e-10));
  }
  CHECK(applicable > 0);
}
