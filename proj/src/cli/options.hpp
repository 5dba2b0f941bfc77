#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rgl/problems.hpp"
#include "rgl/sketch.hpp"
#include "rgl/solver.hpp"

namespace rgl::cli {

/// Invalid combination of flags (exit 64).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fully resolved configuration of one invocation. Serialized as the run
/// manifest; replaying a manifest rebuilds exactly this struct.
struct RunOptions {
  std::string command;
  ProblemSpec problem;
  std::string x0 = "zero";  ///< "zero" or "random"
  std::string method = "gl";
  SketchKind sketch = SketchKind::gaussian;
  std::size_t ell = 0;
  std::size_t zeta = 8;
  double tol = 1e-6;
  std::size_t maxit = 500;
  std::size_t true_residual_every = 1;
  bool reorthogonalize = false;
  double breakdown_tol = 1e-14;
  std::size_t memory_budget_mb = 4096;
  std::vector<std::string> ells;
  std::vector<std::size_t> s_list;
  std::size_t quasi_k = 10;
  std::filesystem::path out = "out";
  std::optional<std::filesystem::path> plot;
  bool check_monotone = false;
  bool save_x = false;
};

nlohmann::json to_json(const RunOptions& o);
RunOptions options_from_json(const nlohmann::json& j);

/// Splits "a,b,c" into trimmed non-empty tokens.
std::vector<std::string> split_list(const std::string& text);

/// Resolved sketch for one RGl run.
struct SketchChoice {
  SketchKind kind;
  std::size_t ell;
};

/// Interprets an --ells token: an integer, "identity", or "auto"
/// (min(n, 8 (k_gl + 1) s)).
SketchChoice resolve_ell(const std::string& token, SketchKind default_kind, std::size_t n, std::size_t s,
                         std::size_t k_gl);

SolverConfig solver_config(const RunOptions& o);

}  // namespace rgl::cli
