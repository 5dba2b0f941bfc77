#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "options.hpp"
#include "plot.hpp"
#include "rgl/bounds.hpp"
#include "rgl/cli.hpp"
#include "rgl/errors.hpp"
#include "rgl/rng.hpp"

namespace rgl::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return {buf, res.ptr};
}

std::string short_num(double v, int precision = 3) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Problem {
  SparseMatrix a;
  BlockVector b;
  std::optional<BlockVector> x_star;
  BlockVector x0;
};

Problem build_problem(const RunOptions& o, std::size_t s, std::ostream& err) {
  ProblemSpec spec = o.problem;
  spec.s = s;
  if (spec.generator == ProblemSpec::Generator::convdiff2d) {
    const double pe = mesh_peclet(spec.grid, spec.nu, spec.wind);
    if (pe > 1.0) err << "warning: mesh Peclet number " << short_num(pe) << " > 1; centered convection is unstable\n";
  }
  SparseMatrix a = load_matrix(spec);
  RhsData rhs = gen_rhs(a, spec);
  BlockVector x0(a.n(), s);
  if (o.x0 == "random") {
    x0 = random_block(a.n(), s, spec.seed, kInitialGuessStream);
  } else if (o.x0 != "zero") {
    throw UsageError("--x0 must be 'zero' or 'random'");
  }
  return {std::move(a), std::move(rhs.b), std::move(rhs.x_star), std::move(x0)};
}

SketchOperator make_operator(const RunOptions& o, SketchChoice choice, std::size_t n) {
  return make_sketch(choice.kind, choice.kind == SketchKind::identity ? n : choice.ell, n, o.problem.seed, o.zeta);
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw FileError("cannot create output directory '" + dir.string() + "'", FileError::Kind::output_failure);
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FileError("cannot open '" + path.string() + "' for writing", FileError::Kind::output_failure);
  f << content;
  f.flush();
  if (!f) throw FileError("write to '" + path.string() + "' failed", FileError::Kind::output_failure);
}

json phase_json(const SolveReport& r) {
  return {{"matvec", r.times.matvec},
          {"orthogonalization", r.times.orthogonalization},
          {"sketch", r.times.sketch},
          {"least_squares", r.times.least_squares},
          {"total", r.times.total()}};
}

json report_json(const SolveReport& r, const Problem& p, const BlockVector& x) {
  json j = {
      {"method", r.method},
      {"sketch", r.sketch_kind ? json(to_string(*r.sketch_kind)) : json(nullptr)},
      {"ell", r.sketch_kind ? json(r.ell) : json(nullptr)},
      {"iterations", r.iterations},
      {"converged", r.converged},
      {"breakdown_step", r.breakdown_step ? json(*r.breakdown_step) : json(nullptr)},
      {"initial_residual", r.initial_residual},
      {"beta", r.beta},
      {"ls_residual_final", r.ls_residual_history.back()},
      {"res", r.true_residual_final},
      {"res_relative", finite_or_null(r.relative_residual_final)},
      {"sketch_divergence", r.sketch_divergence},
      {"cpu_seconds", phase_json(r)},
      {"residual_check_seconds", r.residual_check_seconds},
  };
  if (p.x_star) {
    BlockVector e = x;
    e.add_scaled(-1.0, *p.x_star);
    j["err"] = frob_norm(e);
    j["err_relative"] = frob_norm(e) / frob_norm(*p.x_star);
  }
  return j;
}

std::string history_csv(const SolveReport& r) {
  std::ostringstream os;
  os << "iter,ls_residual,true_residual,elapsed_ms\n";
  std::size_t t = 0;
  for (std::size_t k = 0; k < r.ls_residual_history.size(); ++k) {
    os << k << ',' << num(r.ls_residual_history[k]) << ',';
    while (t < r.true_residual_history.size() && r.true_residual_history[t].iteration < k) ++t;
    if (t < r.true_residual_history.size() && r.true_residual_history[t].iteration == k) {
      os << num(r.true_residual_history[t].residual);
    } else if (k == 0) {
      os << num(r.initial_residual);
    }
    os << ',' << num(r.elapsed_seconds[k] * 1000.0) << '\n';
  }
  return os.str();
}

json problem_info(const Problem& p) {
  return {{"n", p.a.n()}, {"nnz", p.a.nnz()}, {"s", p.b.cols()}};
}

// ---------------------------------------------------------------- solve

int cmd_solve(const RunOptions& o, std::ostream& out, std::ostream& err) {
  if (o.method != "gl" && o.method != "rgl") throw UsageError("--method must be 'gl' or 'rgl'");
  if (o.method == "rgl" && o.sketch != SketchKind::identity && o.ell == 0) {
    throw UsageError("--method rgl with a random sketch requires --ell");
  }
  const Problem p = build_problem(o, o.problem.s, err);
  const SolverConfig cfg = solver_config(o);
  SolveResult res = [&] {
    if (o.method == "gl") return gl_gmres(p.a, p.b, p.x0, cfg);
    const SketchOperator theta = make_operator(o, {o.sketch, o.ell}, p.a.n());
    return rgl_gmres(p.a, p.b, p.x0, cfg, theta);
  }();
  const SolveReport& r = res.report;

  prepare_dir(o.out);
  write_file(o.out / "report.csv", history_csv(r));
  json summary = report_json(r, p, res.x);
  summary["problem"] = problem_info(p);
  summary["seed"] = o.problem.seed;
  summary["tol"] = o.tol;
  write_file(o.out / "summary.json", summary.dump(2) + "\n");
  write_file(o.out / "manifest.json", to_json(o).dump(2) + "\n");
  if (o.save_x) mm_write_block(o.out / "x.mtx", res.x);

  out << (o.method == "gl" ? "Gl-GMRES" : "RGl-GMRES");
  if (o.method == "rgl") out << " (" << to_string(o.sketch) << ", ell=" << (r.ell) << ")";
  out << ": iter=" << r.iterations << " converged=" << (r.converged ? "yes" : "no")
      << " res=" << short_num(r.true_residual_final) << " rel=" << short_num(r.relative_residual_final)
      << " cpu=" << short_num(r.times.total()) << "s\n";
  if (r.sketch_divergence) err << "warning: true relative residual exceeds " << cfg.divergence_factor << " x tol\n";
  return r.converged ? kExitOk : kExitNotConverged;
}

// -------------------------------------------------------------- compare

struct CompareRow {
  std::string method;
  std::string sketch;
  std::string ell;
  SolveReport report;
  std::optional<QuasiOptimality> quasi;
  std::size_t quasi_k = 0;
};

std::string pad(const std::string& s, std::size_t w, bool right) {
  if (s.size() >= w) return s;
  return right ? std::string(w - s.size(), ' ') + s : s + std::string(w - s.size(), ' ');
}

std::string text_table(const std::vector<std::string>& head, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> w(head.size());
  for (std::size_t c = 0; c < head.size(); ++c) {
    w[c] = head[c].size();
    for (const auto& r : rows) w[c] = std::max(w[c], r[c].size());
  }
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) os << "  ";
      os << pad(cells[c], w[c], c > 0);
    }
    os << '\n';
  };
  line(head);
  std::size_t total = 0;
  for (auto x : w) total += x;
  os << std::string(total + 2 * (w.size() - 1), '-') << '\n';
  for (const auto& r : rows) line(r);
  return os.str();
}

// Fixed-k paired runs for the quasi-optimality columns. Skipped when the
// dense orthonormalization of the residual space would be too expensive.
bool quasi_feasible(std::size_t n, std::size_t k, std::size_t s) {
  const double d = static_cast<double>((k + 1) * s);
  const double nd = static_cast<double>(n);
  return nd * d * 8.0 <= 512.0 * 1024 * 1024 && nd * d * d <= 2e10;
}

std::optional<QuasiOptimality> paired_quasi(const Problem& p, const RunOptions& o, const SketchOperator& theta,
                                            std::size_t k, const std::optional<SolveResult>& gl_fixed) {
  if (!gl_fixed || gl_fixed->report.iterations != k) return std::nullopt;
  SolverConfig cfg = solver_config(o);
  cfg.maxit = k;
  cfg.tol = std::numeric_limits<double>::min();
  cfg.true_residual_cadence = 0;
  cfg.retain_basis = true;
  const SolveResult rg = rgl_gmres(p.a, p.b, p.x0, cfg, theta);
  if (rg.report.iterations != k || !rg.krylov) return std::nullopt;
  const BlockVector r0 = residual_block(p.a, p.b, p.x0);
  const BlockVector span = residual_space_basis(p.a, r0, rg.krylov->basis, k);
  return quasi_optimality_ratio(p.a, p.b, gl_fixed->x, rg.x, theta, span);
}

int cmd_compare(const RunOptions& o, std::ostream& out, std::ostream& err) {
  const std::vector<std::string> ells = o.ells.empty() ? std::vector<std::string>{"auto"} : o.ells;
  const Problem p = build_problem(o, o.problem.s, err);
  SolverConfig cfg = solver_config(o);
  cfg.true_residual_cadence = 0;
  const std::size_t n = p.a.n();
  const std::size_t s = p.b.cols();

  std::vector<CompareRow> rows;
  const SolveResult gl = gl_gmres(p.a, p.b, p.x0, cfg);
  rows.push_back({"Gl-GMRES", "-", "-", gl.report, std::nullopt, 0});
  const std::size_t k_gl = gl.report.iterations;

  const std::size_t qk = std::min(o.quasi_k, k_gl);
  std::optional<SolveResult> gl_fixed;
  if (qk >= 1 && quasi_feasible(n, qk, s)) {
    SolverConfig fixed = cfg;
    fixed.maxit = qk;
    fixed.tol = std::numeric_limits<double>::min();
    gl_fixed = gl_gmres(p.a, p.b, p.x0, fixed);
  }

  for (const auto& tok : ells) {
    const SketchChoice choice = resolve_ell(tok, o.sketch, n, s, k_gl);
    const SketchOperator theta = make_operator(o, choice, n);
    SolveResult rg = rgl_gmres(p.a, p.b, p.x0, cfg, theta);
    CompareRow row{"RGl-GMRES", to_string(choice.kind), std::to_string(theta.ell()), std::move(rg.report),
                   std::nullopt, 0};
    if (gl_fixed) {
      row.quasi = paired_quasi(p, o, theta, qk, gl_fixed);
      row.quasi_k = qk;
    }
    rows.push_back(std::move(row));
  }

  prepare_dir(o.out);
  std::ostringstream csv;
  csv << "method,sketch,ell,cpu_s,orth_s,iter,converged,res,res_relative,quasi_k,quasi_ratio,quasi_bound,"
         "epsilon_hat\n";
  std::vector<std::vector<std::string>> table;
  json summary = json::array();
  bool all_converged = true;
  for (const auto& r : rows) {
    all_converged = all_converged && r.report.converged;
    const auto& rep = r.report;
    csv << r.method << ',' << r.sketch << ',' << r.ell << ',' << num(rep.times.total()) << ','
        << num(rep.times.orthogonalization) << ',' << rep.iterations << ',' << (rep.converged ? 1 : 0) << ','
        << num(rep.true_residual_final) << ',' << num(rep.relative_residual_final) << ',';
    std::vector<std::string> cells{r.method,
                                   r.ell,
                                   short_num(rep.times.total()),
                                   std::to_string(rep.iterations),
                                   short_num(rep.true_residual_final),
                                   short_num(rep.relative_residual_final),
                                   short_num(rep.times.orthogonalization)};
    if (r.quasi) {
      csv << r.quasi_k << ',' << num(r.quasi->ratio) << ',' << num(r.quasi->bound) << ','
          << num(r.quasi->epsilon_hat) << '\n';
      cells.push_back(short_num(r.quasi->ratio, 6));
      cells.push_back(r.quasi->applicable ? short_num(r.quasi->bound, 6) : "n/a");
      cells.push_back(short_num(r.quasi->epsilon_hat));
    } else {
      csv << ",,,\n";
      cells.insert(cells.end(), {"-", "-", "-"});
    }
    table.push_back(std::move(cells));
    json jr = {{"method", r.method},
               {"sketch", r.sketch},
               {"ell", r.ell},
               {"iterations", rep.iterations},
               {"converged", rep.converged},
               {"res", rep.true_residual_final},
               {"res_relative", finite_or_null(rep.relative_residual_final)},
               {"sketch_divergence", rep.sketch_divergence},
               {"cpu_seconds", phase_json(rep)}};
    if (r.quasi) {
      jr["quasi"] = {{"k", r.quasi_k},
                     {"ratio", finite_or_null(r.quasi->ratio)},
                     {"bound", finite_or_null(r.quasi->bound)},
                     {"epsilon_hat", r.quasi->epsilon_hat},
                     {"applicable", r.quasi->applicable}};
    }
    summary.push_back(std::move(jr));
  }
  const std::string txt =
      text_table({"Method", "ell", "CPU(s)", "Iter", "Res", "RelRes", "Orth(s)", "QO ratio", "QO bound", "eps"},
                 table);
  write_file(o.out / "compare.csv", csv.str());
  write_file(o.out / "compare.txt", txt);
  write_file(o.out / "summary.json",
             json{{"problem", problem_info(p)}, {"seed", o.problem.seed}, {"rows", summary}}.dump(2) + "\n");
  write_file(o.out / "manifest.json", to_json(o).dump(2) + "\n");
  out << txt;
  return all_converged ? kExitOk : kExitNotConverged;
}

// ---------------------------------------------------------------- sweep

bool nonincreasing(const std::vector<double>& h) {
  for (std::size_t k = 1; k < h.size(); ++k)
    if (h[k] > h[k - 1] * (1.0 + 1e-12)) return false;
  return true;
}

int cmd_sweep(const RunOptions& o, std::ostream& out, std::ostream& err) {
  if (o.ells.empty()) throw UsageError("sweep requires --ells");
  std::vector<std::size_t> s_values = o.s_list.empty() ? std::vector<std::size_t>{o.problem.s} : o.s_list;
  std::sort(s_values.begin(), s_values.end());
  s_values.erase(std::unique(s_values.begin(), s_values.end()), s_values.end());

  std::ostringstream runs;
  runs << "s,method,sketch,ell,iter,converged,res,res_relative,cpu_s,orth_s\n";
  std::ostringstream hist;
  hist << "s,method,sketch,ell,iter,ls_residual,ls_relative\n";
  std::vector<Series> series;
  bool monotone = true;
  bool all_converged = true;

  auto record = [&](std::size_t s, const std::string& method, const std::string& sketch, const std::string& ell,
                    const SolveReport& r) {
    all_converged = all_converged && r.converged;
    runs << s << ',' << method << ',' << sketch << ',' << ell << ',' << r.iterations << ','
         << (r.converged ? 1 : 0) << ',' << num(r.true_residual_final) << ',' << num(r.relative_residual_final)
         << ',' << num(r.times.total()) << ',' << num(r.times.orthogonalization) << '\n';
    Series sr{"s=" + std::to_string(s) + " " + method + (ell == "-" ? "" : " ell=" + ell), {}};
    const double h0 = r.ls_residual_history.front();
    for (std::size_t k = 0; k < r.ls_residual_history.size(); ++k) {
      const double v = r.ls_residual_history[k];
      const double rel = h0 > 0.0 ? v / h0 : 0.0;
      hist << s << ',' << method << ',' << sketch << ',' << ell << ',' << k << ',' << num(v) << ',' << num(rel)
           << '\n';
      sr.y.push_back(rel);
    }
    if (!nonincreasing(r.ls_residual_history)) {
      monotone = false;
      err << "monotonicity violated: " << sr.label << '\n';
    }
    series.push_back(std::move(sr));
  };

  SolverConfig cfg = solver_config(o);
  cfg.true_residual_cadence = 0;
  for (std::size_t s : s_values) {
    if (s < 1) throw UsageError("--s-list entries must be >= 1");
    const Problem p = build_problem(o, s, err);
    const SolveResult gl = gl_gmres(p.a, p.b, p.x0, cfg);
    record(s, "gl", "-", "-", gl.report);
    std::vector<SketchChoice> choices;
    for (const auto& tok : o.ells) choices.push_back(resolve_ell(tok, o.sketch, p.a.n(), s, gl.report.iterations));
    std::stable_sort(choices.begin(), choices.end(), [](const SketchChoice& x, const SketchChoice& y) {
      return std::tie(x.ell, x.kind) < std::tie(y.ell, y.kind);
    });
    for (const auto& c : choices) {
      const SketchOperator theta = make_operator(o, c, p.a.n());
      const SolveResult rg = rgl_gmres(p.a, p.b, p.x0, cfg, theta);
      record(s, "rgl", to_string(c.kind), std::to_string(theta.ell()), rg.report);
    }
  }

  prepare_dir(o.out);
  write_file(o.out / "sweep.csv", runs.str());
  write_file(o.out / "histories.csv", hist.str());
  write_file(o.out / "manifest.json", to_json(o).dump(2) + "\n");
  if (o.plot) {
    std::ostringstream svg;
    write_svg(svg, "Relative least-squares residual", "residual / initial", series);
    write_file(*o.plot, svg.str());
  }
  out << runs.str();
  if (o.check_monotone) {
    out << "monotone check: " << (monotone ? "ok" : "FAILED") << '\n';
    if (!monotone) return kExitError;
  }
  return all_converged ? kExitOk : kExitNotConverged;
}

int dispatch(const RunOptions& o, std::ostream& out, std::ostream& err) {
  if (o.command == "solve") return cmd_solve(o, out, err);
  if (o.command == "compare") return cmd_compare(o, out, err);
  if (o.command == "sweep") return cmd_sweep(o, out, err);
  throw UsageError("unknown command '" + o.command + "'");
}

std::array<double, 2> parse_wind(const std::string& text) {
  const auto parts = split_list(text);
  if (parts.size() != 2) throw UsageError("--wind expects 'wx,wy'");
  std::array<double, 2> w{};
  for (std::size_t i = 0; i < 2; ++i) {
    const auto [p, ec] = std::from_chars(parts[i].data(), parts[i].data() + parts[i].size(), w[i]);
    if (ec != std::errc{} || p != parts[i].data() + parts[i].size()) throw UsageError("--wind: bad number");
  }
  return w;
}

// Flags shared by solve / compare / sweep, bound to a RunOptions instance.
struct Flags {
  RunOptions o;
  std::string matrix;
  std::string gen;
  std::string wind = "1,1";
  std::string rhs = "manufactured";
  std::string sketch = "gaussian";
  std::string ells;
  std::string s_list;
  std::string plot;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--matrix", f.matrix, "Matrix Market file with A");
  app->add_option("--gen", f.gen, "Problem generator")->check(CLI::IsMember({"convdiff"}));
  app->add_option("--grid", f.o.problem.grid, "Interior grid side g (n = g^2)")->check(CLI::Range(3, 1 << 20));
  app->add_option("--nu", f.o.problem.nu, "Diffusion coefficient")->check(CLI::PositiveNumber);
  app->add_option("--wind", f.wind, "Constant convection 'wx,wy'");
  app->add_option("--s", f.o.problem.s, "Number of right-hand sides")->check(CLI::Range(1, 1 << 20));
  app->add_option("--rhs", f.rhs, "Right-hand side mode")->check(CLI::IsMember({"random", "manufactured"}));
  app->add_option("--x0", f.o.x0, "Initial guess")->check(CLI::IsMember({"zero", "random"}));
  app->add_option("--sketch", f.sketch, "Sketch kind")
      ->check(CLI::IsMember({"identity", "gaussian", "sparsesign", "sparse-sign"}));
  app->add_option("--zeta", f.o.zeta, "Nonzeros per column of the sparse-sign sketch")->check(CLI::PositiveNumber);
  app->add_option("--tol", f.o.tol, "Relative residual tolerance")->check(CLI::Range(0.0, 1.0));
  app->add_option("--maxit", f.o.maxit, "Maximum Arnoldi steps")->check(CLI::PositiveNumber);
  app->add_option("--seed", f.o.problem.seed, "Random seed");
  app->add_option("--out", f.o.out, "Output directory");
  app->add_flag("--reorth", f.o.reorthogonalize, "Second Gram-Schmidt pass");
  app->add_option("--breakdown-tol", f.o.breakdown_tol, "Relative breakdown threshold")->check(CLI::NonNegativeNumber);
  app->add_option("--memory-budget-mb", f.o.memory_budget_mb, "Basis memory limit in MiB")
      ->check(CLI::PositiveNumber);
}

void finalize(Flags& f, const std::string& command) {
  RunOptions& o = f.o;
  o.command = command;
  if (!f.matrix.empty() && !f.gen.empty()) throw UsageError("--matrix and --gen are mutually exclusive");
  if (!f.matrix.empty()) {
    o.problem.generator = ProblemSpec::Generator::matrix_market;
    std::error_code ec;
    const fs::path abs = fs::absolute(f.matrix, ec);
    o.problem.matrix_path = ec ? fs::path(f.matrix) : abs.lexically_normal();
  } else {
    o.problem.generator = ProblemSpec::Generator::convdiff2d;
  }
  o.problem.wind = parse_wind(f.wind);
  o.problem.rhs = f.rhs == "random" ? RhsMode::random : RhsMode::manufactured;
  o.sketch = *parse_sketch_kind(f.sketch);
  if (!(o.tol > 0.0 && o.tol < 1.0)) throw UsageError("--tol must lie in (0, 1)");
  o.ells = split_list(f.ells);
  for (const auto& tok : split_list(f.s_list)) {
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size() || v == 0) throw UsageError("--s-list: bad entry '" + tok + "'");
    o.s_list.push_back(v);
  }
  if (!f.plot.empty()) o.plot = fs::path(f.plot);
}

int run_checked(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Global GMRES and sketched global GMRES for AX = B", "rglbench"};
  app.require_subcommand(1);

  Flags solve;
  auto* s_cmd = app.add_subcommand("solve", "Run one solver and write report.csv / summary.json");
  add_common(s_cmd, solve);
  s_cmd->add_option("--method", solve.o.method, "gl or rgl")->check(CLI::IsMember({"gl", "rgl"}));
  s_cmd->add_option("--ell", solve.o.ell, "Sketch dimension")->check(CLI::PositiveNumber);
  s_cmd->add_option("--true-residual-every", solve.o.true_residual_every,
                    "Recompute the true residual every p steps (0: only at the end)");
  s_cmd->add_flag("--save-x", solve.o.save_x, "Write the solution block to x.mtx");

  Flags compare;
  compare.o.ells = {};
  auto* c_cmd = app.add_subcommand("compare", "Gl-GMRES against RGl-GMRES for several sketch sizes");
  add_common(c_cmd, compare);
  c_cmd->add_option("--ells", compare.ells, "Sketch sizes: integers, 'identity', 'auto'");
  c_cmd->add_option("--quasi-k", compare.o.quasi_k, "Step count for the paired quasi-optimality runs (0: off)");

  Flags sweep;
  auto* w_cmd = app.add_subcommand("sweep", "Cartesian sweep over sketch sizes and block widths");
  add_common(w_cmd, sweep);
  w_cmd->add_option("--ells", sweep.ells, "Sketch sizes")->required();
  w_cmd->add_option("--s-list", sweep.s_list, "Block widths (default: --s)");
  w_cmd->add_option("--plot", sweep.plot, "SVG chart of residual histories");
  w_cmd->add_flag("--check-monotone", sweep.o.check_monotone, "Fail unless every history is nonincreasing");

  std::string manifest;
  std::string replay_out;
  auto* r_cmd = app.add_subcommand("replay", "Re-run a command from its manifest.json");
  r_cmd->add_option("--manifest", manifest, "Path to manifest.json")->required();
  r_cmd->add_option("--out", replay_out, "Output directory (default: <manifest dir>/replay)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (s_cmd->parsed()) {
    finalize(solve, "solve");
    return dispatch(solve.o, out, err);
  }
  if (c_cmd->parsed()) {
    finalize(compare, "compare");
    compare.o.true_residual_every = 0;
    return dispatch(compare.o, out, err);
  }
  if (w_cmd->parsed()) {
    finalize(sweep, "sweep");
    sweep.o.true_residual_every = 0;
    return dispatch(sweep.o, out, err);
  }
  std::ifstream in(manifest);
  if (!in) throw FileError("cannot open manifest '" + manifest + "'", FileError::Kind::missing_input);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("manifest is not valid JSON: ") + e.what());
  }
  RunOptions o = options_from_json(j);
  o.out = replay_out.empty() ? fs::path(manifest).parent_path() / "replay" : fs::path(replay_out);
  return dispatch(o, out, err);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    return run_checked(argc, argv, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FileError& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == FileError::Kind::missing_input ? kExitNoInput : kExitCantCreate;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace rgl::cli
