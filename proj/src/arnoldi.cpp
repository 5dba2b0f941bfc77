#include "rgl/arnoldi.hpp"

#include <cmath>
#include <string>

#include "rgl/errors.hpp"

namespace rgl {

std::vector<double> HessenbergFactor::column(std::size_t j) const {
  std::vector<double> out(j + 2);
  for (std::size_t i = 0; i < j + 2; ++i) out[i] = (*this)(i, j);
  return out;
}

GlobalArnoldi::GlobalArnoldi(const SparseMatrix& a, const BlockVector& r0, const SketchOperator* theta,
                             const ArnoldiOptions& options, PhaseTimes* times)
    : a_(a), theta_(theta), options_(options), times_(times) {
  if (a.n() != r0.rows()) {
    throw ShapeError("arnoldi: matrix dimension " + std::to_string(a.n()) + " != block rows " +
                     std::to_string(r0.rows()));
  }
  if (theta_ != nullptr && theta_->n() != a.n()) {
    throw ShapeError("arnoldi: sketch input dimension " + std::to_string(theta_->n()) + " != " +
                     std::to_string(a.n()));
  }
  if (!(options_.breakdown_tol >= 0.0)) throw ParameterError("arnoldi: breakdown_tol must be >= 0");

  const double r0_norm = frob_norm(r0);
  if (r0_norm == 0.0) throw DegenerateInputError("arnoldi: initial block is zero");
  if (!std::isfinite(r0_norm)) throw NumericalFailure("arnoldi: non-finite initial block", 0);

  check_budget(1, r0.cols());
  if (theta_ == nullptr) {
    beta_ = r0_norm;
    BlockVector v1 = r0;
    v1.scale(1.0 / beta_);
    basis_.push_back(std::move(v1));
    return;
  }

  BlockVector s1(theta_->ell(), r0.cols());
  {
    ScopedTimer t(times_ ? &times_->sketch : nullptr);
    theta_->apply(r0, s1);
  }
  beta_ = frob_norm(s1);
  if (beta_ == 0.0) throw SemiNormDegeneracyError("arnoldi: sketch annihilates the nonzero initial block");
  BlockVector q1 = r0;
  q1.scale(1.0 / beta_);
  s1.scale(1.0 / beta_);
  basis_.push_back(std::move(q1), std::move(s1));
}

void GlobalArnoldi::check_budget(std::size_t blocks, std::size_t cols) const {
  const std::size_t rows = a_.n() + (theta_ != nullptr ? theta_->ell() : 0);
  const std::size_t bytes = blocks * rows * cols * sizeof(double);
  if (bytes > options_.memory_budget_bytes) {
    throw ResourceError("arnoldi: " + std::to_string(blocks) + " basis blocks need " + std::to_string(bytes) +
                        " bytes, budget is " + std::to_string(options_.memory_budget_bytes));
  }
}

std::span<const double> GlobalArnoldi::step() {
  if (broke_down()) throw ParameterError("arnoldi: cannot step past a breakdown");
  const std::size_t j = columns_.size();
  const std::size_t n = a_.n();
  const std::size_t s = basis_[0].cols();

  BlockVector w(n, s);
  {
    ScopedTimer t(times_ ? &times_->matvec : nullptr);
    spmm_block(a_, basis_[j], w);
  }
  std::optional<BlockVector> z;
  if (theta_ != nullptr) {
    ScopedTimer t(times_ ? &times_->sketch : nullptr);
    z.emplace(theta_->ell(), s);
    theta_->apply(w, *z);
  }

  std::vector<double> h(j + 2, 0.0);
  double ref_norm = 0.0;
  {
    ScopedTimer t(times_ ? &times_->orthogonalization : nullptr);
    ref_norm = z ? frob_norm(*z) : frob_norm(w);
    const int passes = options_.reorthogonalize ? 2 : 1;
    for (int pass = 0; pass < passes; ++pass) {
      for (std::size_t i = 0; i <= j; ++i) {
        const double hij = z ? frob_inner(*z, basis_.sketched(i)) : frob_inner(w, basis_[i]);
        w.add_scaled(-hij, basis_[i]);
        if (z) z->add_scaled(-hij, basis_.sketched(i));
        h[i] += hij;
      }
    }
    h[j + 1] = z ? frob_norm(*z) : frob_norm(w);
  }

  for (double v : h) {
    if (!std::isfinite(v)) throw NumericalFailure("arnoldi: non-finite Hessenberg entry", j + 1);
  }

  if (h[j + 1] <= options_.breakdown_tol * ref_norm) {
    h[j + 1] = 0.0;
    breakdown_step_ = j + 1;
  } else {
    check_budget(basis_.size() + 1, s);
    ScopedTimer t(times_ ? &times_->orthogonalization : nullptr);
    const double inv = 1.0 / h[j + 1];
    w.scale(inv);
    if (z) {
      z->scale(inv);
      basis_.push_back(std::move(w), std::move(*z));
    } else {
      basis_.push_back(std::move(w));
    }
  }
  columns_.push_back(std::move(h));
  return columns_.back();
}

HessenbergFactor GlobalArnoldi::hessenberg() const {
  HessenbergFactor f;
  f.k = columns_.size();
  f.entries = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(f.k + 1), static_cast<Eigen::Index>(f.k));
  for (std::size_t j = 0; j < f.k; ++j)
    for (std::size_t i = 0; i < columns_[j].size(); ++i)
      f.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = columns_[j][i];
  return f;
}

ArnoldiResult GlobalArnoldi::release() && {
  ArnoldiResult r;
  r.hess = hessenberg();
  r.basis = std::move(basis_);
  r.beta = beta_;
  r.breakdown_step = breakdown_step_;
  return r;
}

namespace {

ArnoldiResult run_arnoldi(const SparseMatrix& a, const BlockVector& r0, std::size_t k, const SketchOperator* theta,
                          const ArnoldiOptions& options) {
  if (k < 1) throw ParameterError("arnoldi: k must be >= 1");
  GlobalArnoldi process(a, r0, theta, options);
  while (process.steps() < k && !process.broke_down()) process.step();
  return std::move(process).release();
}

}  // namespace

ArnoldiResult gl_arnoldi(const SparseMatrix& a, const BlockVector& r0, std::size_t k, const ArnoldiOptions& options) {
  return run_arnoldi(a, r0, k, nullptr, options);
}

ArnoldiResult rgl_arnoldi(const SparseMatrix& a, const BlockVector& r0, std::size_t k, const SketchOperator& theta,
                          const ArnoldiOptions& options) {
  return run_arnoldi(a, r0, k, &theta, options);
}

}  // namespace rgl
