#include "rgl/solver.hpp"

#include <cmath>
#include <string>

#include "rgl/errors.hpp"
#include "rgl/lstsq.hpp"

namespace rgl {

BlockVector residual_block(const SparseMatrix& a, const BlockVector& b, const BlockVector& x) {
  if (!b.same_shape(x)) throw ShapeError("residual: B and X shapes differ");
  BlockVector r = spmm_block(a, x);
  r.scale(-1.0);
  r.add_scaled(1.0, b);
  return r;
}

namespace {

void validate(const SparseMatrix& a, const BlockVector& b, const BlockVector& x0, const SolverConfig& cfg) {
  if (a.n() != b.rows()) {
    throw ShapeError("solver: matrix is " + std::to_string(a.n()) + "x" + std::to_string(a.n()) + " but B has " +
                     std::to_string(b.rows()) + " rows");
  }
  if (!b.same_shape(x0)) throw ShapeError("solver: X0 shape differs from B");
  if (cfg.maxit < 1) throw ParameterError("solver: maxit must be >= 1");
  if (!(cfg.tol > 0.0 && cfg.tol < 1.0)) throw ParameterError("solver: tol must lie in (0, 1)");
  if (!(cfg.divergence_factor >= 1.0)) throw ParameterError("solver: divergence factor must be >= 1");
}

BlockVector assemble(const BlockVector& x0, const BasisSequence& basis, std::span<const double> z) {
  BlockVector x = x0;
  for (std::size_t i = 0; i < z.size(); ++i) x.add_scaled(z[i], basis[i]);
  return x;
}

SolveResult run_gmres(const SparseMatrix& a, const BlockVector& b, const BlockVector& x0, const SolverConfig& cfg,
                      const SketchOperator* theta) {
  validate(a, b, x0, cfg);
  SolveReport rep;
  rep.method = theta != nullptr ? "rgl" : "gl";
  if (theta != nullptr) {
    rep.sketch_kind = theta->kind();
    rep.ell = theta->ell();
    rep.seed = theta->seed();
  }

  BlockVector r0(b.rows(), b.cols());
  {
    ScopedTimer t(&rep.times.matvec);
    r0 = residual_block(a, b, x0);
  }
  rep.initial_residual = frob_norm(r0);
  if (!std::isfinite(rep.initial_residual)) throw NumericalFailure("solver: non-finite initial residual", 0);

  if (rep.initial_residual == 0.0) {
    rep.converged = true;
    rep.ls_residual_history = {0.0};
    rep.true_residual_history.push_back({0, 0.0});
    rep.elapsed_seconds = {rep.times.total()};
    return {x0, std::move(rep), std::nullopt};
  }

  ArnoldiOptions opts;
  opts.breakdown_tol = cfg.breakdown_tol;
  opts.reorthogonalize = cfg.reorthogonalize;
  opts.memory_budget_bytes = cfg.memory_budget_bytes;
  GlobalArnoldi process(a, r0, theta, opts, &rep.times);
  rep.beta = process.beta();

  GivensLeastSquares ls(rep.beta);
  rep.ls_residual_history.push_back(rep.beta);
  rep.elapsed_seconds.push_back(rep.times.total());
  const double threshold = cfg.tol * rep.beta;

  while (process.steps() < cfg.maxit) {
    const auto column = process.step();
    const std::size_t k = process.steps();
    {
      ScopedTimer t(&rep.times.least_squares);
      ls.append_column(column);
    }
    const double res = ls.residual();
    if (!std::isfinite(res)) throw NumericalFailure("solver: non-finite least-squares residual", k);
    rep.ls_residual_history.push_back(res);
    rep.elapsed_seconds.push_back(rep.times.total());
    rep.iterations = k;

    if (cfg.true_residual_cadence > 0 && k % cfg.true_residual_cadence == 0) {
      ScopedTimer t(&rep.residual_check_seconds);
      const BlockVector xk = assemble(x0, process.basis(), ls.solve());
      rep.true_residual_history.push_back({k, frob_norm(residual_block(a, b, xk))});
    }
    if (res <= threshold) {
      rep.converged = true;
      break;
    }
    if (process.broke_down()) break;
  }
  rep.breakdown_step = process.breakdown_step();

  BlockVector x = x0;
  {
    ScopedTimer t(&rep.times.least_squares);
    x = assemble(x0, process.basis(), ls.solve());
  }
  if (!x.all_finite()) throw NumericalFailure("solver: non-finite iterate", rep.iterations);
  {
    ScopedTimer t(&rep.times.matvec);
    rep.true_residual_final = frob_norm(residual_block(a, b, x));
  }
  rep.relative_residual_final = rep.true_residual_final / rep.initial_residual;
  if (rep.true_residual_history.empty() || rep.true_residual_history.back().iteration != rep.iterations) {
    rep.true_residual_history.push_back({rep.iterations, rep.true_residual_final});
  }
  if (theta != nullptr && rep.converged && rep.relative_residual_final > cfg.divergence_factor * cfg.tol) {
    rep.sketch_divergence = true;
  }

  std::optional<ArnoldiResult> krylov;
  if (cfg.retain_basis) krylov = std::move(process).release();
  return {std::move(x), std::move(rep), std::move(krylov)};
}

}  // namespace

SolveResult gl_gmres(const SparseMatrix& a, const BlockVector& b, const BlockVector& x0, const SolverConfig& cfg) {
  return run_gmres(a, b, x0, cfg, nullptr);
}

SolveResult rgl_gmres(const SparseMatrix& a, const BlockVector& b, const BlockVector& x0, const SolverConfig& cfg,
                      const SketchOperator& theta) {
  return run_gmres(a, b, x0, cfg, &theta);
}

SolveResult rgl_gmres(const SparseMatrix& a, const BlockVector& b, const BlockVector& x0, const SolverConfig& cfg) {
  if (!cfg.sketch) throw ParameterError("rgl_gmres: sketch configuration required");
  SketchParams p;
  p.kind = cfg.sketch->kind;
  p.ell = cfg.sketch->ell;
  p.n = a.n();
  p.seed = cfg.sketch->seed;
  p.zeta = cfg.sketch->zeta;
  const SketchOperator theta(p);
  return run_gmres(a, b, x0, cfg, &theta);
}

}  // namespace rgl
