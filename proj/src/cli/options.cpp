#include "options.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace rgl::cli {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  auto b = s.begin();
  auto e = s.end();
  while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
  return {b, e};
}

std::string generator_name(ProblemSpec::Generator g) {
  return g == ProblemSpec::Generator::convdiff2d ? "convdiff" : "matrix-market";
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string::npos ? text.size() : comma;
    std::string tok = trim(text.substr(start, end - start));
    if (!tok.empty()) out.push_back(std::move(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

json to_json(const RunOptions& o) {
  json problem = {
      {"generator", generator_name(o.problem.generator)},
      {"grid", o.problem.grid},
      {"matrix", o.problem.matrix_path.string()},
      {"nu", o.problem.nu},
      {"wind", {o.problem.wind[0], o.problem.wind[1]}},
      {"rhs", o.problem.rhs == RhsMode::manufactured ? "manufactured" : "random"},
      {"s", o.problem.s},
      {"seed", o.problem.seed},
      {"x0", o.x0},
  };
  json solver = {
      {"method", o.method},
      {"tol", o.tol},
      {"maxit", o.maxit},
      {"true_residual_every", o.true_residual_every},
      {"reorthogonalize", o.reorthogonalize},
      {"breakdown_tol", o.breakdown_tol},
      {"memory_budget_mb", o.memory_budget_mb},
  };
  json sketch = {{"kind", to_string(o.sketch)}, {"ell", o.ell}, {"zeta", o.zeta}, {"seed", o.problem.seed}};
  json j = {
      {"tool", "rglbench"},
      {"version", "0.1.0"},
      {"command", o.command},
      {"problem", problem},
      {"solver", solver},
      {"sketch", sketch},
      {"ells", o.ells},
      {"s_list", o.s_list},
      {"quasi_k", o.quasi_k},
      {"out", o.out.string()},
      {"plot", o.plot ? json(o.plot->string()) : json(nullptr)},
      {"check_monotone", o.check_monotone},
      {"save_x", o.save_x},
  };
  return j;
}

RunOptions options_from_json(const json& j) {
  try {
    RunOptions o;
    o.command = j.at("command").get<std::string>();
    const json& p = j.at("problem");
    const auto gen = p.at("generator").get<std::string>();
    if (gen == "convdiff") {
      o.problem.generator = ProblemSpec::Generator::convdiff2d;
    } else if (gen == "matrix-market") {
      o.problem.generator = ProblemSpec::Generator::matrix_market;
    } else {
      throw UsageError("manifest: unknown generator '" + gen + "'");
    }
    o.problem.grid = p.at("grid").get<std::size_t>();
    o.problem.matrix_path = p.at("matrix").get<std::string>();
    o.problem.nu = p.at("nu").get<double>();
    o.problem.wind = {p.at("wind").at(0).get<double>(), p.at("wind").at(1).get<double>()};
    const auto rhs = p.at("rhs").get<std::string>();
    if (rhs != "manufactured" && rhs != "random") throw UsageError("manifest: unknown rhs mode '" + rhs + "'");
    o.problem.rhs = rhs == "manufactured" ? RhsMode::manufactured : RhsMode::random;
    o.problem.s = p.at("s").get<std::size_t>();
    o.problem.seed = p.at("seed").get<std::uint64_t>();
    o.x0 = p.at("x0").get<std::string>();

    const json& s = j.at("solver");
    o.method = s.at("method").get<std::string>();
    o.tol = s.at("tol").get<double>();
    o.maxit = s.at("maxit").get<std::size_t>();
    o.true_residual_every = s.at("true_residual_every").get<std::size_t>();
    o.reorthogonalize = s.at("reorthogonalize").get<bool>();
    o.breakdown_tol = s.at("breakdown_tol").get<double>();
    o.memory_budget_mb = s.at("memory_budget_mb").get<std::size_t>();

    const json& k = j.at("sketch");
    const auto kind = parse_sketch_kind(k.at("kind").get<std::string>());
    if (!kind) throw UsageError("manifest: unknown sketch kind");
    o.sketch = *kind;
    o.ell = k.at("ell").get<std::size_t>();
    o.zeta = k.at("zeta").get<std::size_t>();

    o.ells = j.at("ells").get<std::vector<std::string>>();
    o.s_list = j.at("s_list").get<std::vector<std::size_t>>();
    o.quasi_k = j.at("quasi_k").get<std::size_t>();
    o.out = j.at("out").get<std::string>();
    if (!j.at("plot").is_null()) o.plot = j.at("plot").get<std::string>();
    o.check_monotone = j.at("check_monotone").get<bool>();
    o.save_x = j.at("save_x").get<bool>();
    return o;
  } catch (const json::exception& e) {
    throw UsageError(std::string("manifest: ") + e.what());
  }
}

SketchChoice resolve_ell(const std::string& token, SketchKind default_kind, std::size_t n, std::size_t s,
                         std::size_t k_gl) {
  if (token == "identity") return {SketchKind::identity, n};
  if (token == "auto") return {default_kind == SketchKind::identity ? SketchKind::identity : default_kind,
                               default_kind == SketchKind::identity ? n : std::min(n, 8 * (k_gl + 1) * s)};
  std::size_t ell = 0;
  const auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), ell);
  if (ec != std::errc{} || p != token.data() + token.size() || ell == 0) {
    throw UsageError("invalid sketch size '" + token + "' (expected a positive integer, 'identity' or 'auto')");
  }
  if (default_kind == SketchKind::identity) return {SketchKind::identity, n};
  return {default_kind, ell};
}

SolverConfig solver_config(const RunOptions& o) {
  SolverConfig cfg;
  cfg.maxit = o.maxit;
  cfg.tol = o.tol;
  cfg.true_residual_cadence = o.true_residual_every;
  cfg.breakdown_tol = o.breakdown_tol;
  cfg.reorthogonalize = o.reorthogonalize;
  cfg.memory_budget_bytes = o.memory_budget_mb << 20;
  return cfg;
}

}  // namespace rgl::cli
