#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rgl/cli.hpp"
#include "rgl/problems.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rglbench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = rgl::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

// report.csv without the elapsed_ms column
std::string strip_timing(const fs::path& p) {
  std::string out;
  for (const auto& row : read_csv(p)) {
    for (std::size_t i = 0; i + 1 < row.size(); ++i) out += row[i] + ",";
    out += "\n";
  }
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("rgl_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("solve writes report, summary and manifest") {
  const auto dir = scratch("solve");
  const auto r = cli({"solve", "--gen", "convdiff", "--grid", "12", "--s", "3", "--method", "gl", "--tol", "1e-6",
                      "--out", dir.string()});
  REQUIRE(r.code == rgl::cli::kExitOk);
  const auto rows = read_csv(dir / "report.csv");
  REQUIRE(rows.size() > 2);
  CHECK(rows[0] == std::vector<std::string>{"iter", "ls_residual", "true_residual", "elapsed_ms"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 4);
    for (const auto& c : rows[i]) CHECK(std::isfinite(std::stod(c)));
  }
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary["converged"] == true);
  CHECK(summary["method"] == "gl");
  CHECK(summary.contains("err"));
  const auto& cpu = summary["cpu_seconds"];
  const double sum = cpu["matvec"].get<double>() + cpu["orthogonalization"].get<double>() +
                     cpu["sketch"].get<double>() + cpu["least_squares"].get<double>();
  CHECK(std::abs(sum - cpu["total"].get<double>()) <= 0.01 * cpu["total"].get<double>() + 1e-12);
  CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("usage and file errors map to exit codes") {
  CHECK(cli({"solve", "--method", "rgl", "--ell", "0"}).code == rgl::cli::kExitUsage);
  CHECK(cli({"solve", "--method", "rgl", "--sketch", "gaussian", "--grid", "5"}).code == rgl::cli::kExitUsage);
  CHECK(cli({"solve", "--method", "bogus"}).code == rgl::cli::kExitUsage);
  CHECK(cli({"solve", "--grid", "2"}).code == rgl::cli::kExitUsage);
  CHECK(cli({"frobnicate"}).code == rgl::cli::kExitUsage);
  CHECK(cli({"solve", "--matrix", "/nonexistent/A.mtx"}).code == rgl::cli::kExitNoInput);
  CHECK(cli({"solve", "--grid", "5", "--out", "/proc/rgl_cannot_write"}).code == rgl::cli::kExitCantCreate);
  CHECK(cli({"replay", "--manifest", "/nonexistent/manifest.json"}).code == rgl::cli::kExitNoInput);
  CHECK(cli({"--help"}).code == rgl::cli::kExitOk);
}

TEST_CASE("non-convergence exits with 2") {
  const auto dir = scratch("maxit");
  CHECK(cli({"solve", "--grid", "16", "--s", "2", "--maxit", "3", "--out", dir.string()}).code ==
        rgl::cli::kExitNotConverged);
  CHECK(nlohmann::json::parse(slurp(dir / "summary.json"))["converged"] == false);
}

TEST_CASE("rgl solves from a matrix file are reproducible") {
  const auto dir = scratch("determinism");
  rgl::mm_write(dir / "A.mtx", rgl::gen_convdiff2d(10, 0.05, {1.0, 0.5}));
  const std::vector<std::string> base{"solve",   "--matrix", (dir / "A.mtx").string(), "--method", "rgl",
                                      "--sketch", "gaussian", "--ell", "100", "--seed", "7", "--s", "2", "--save-x"};
  auto a = base;
  a.insert(a.end(), {"--out", (dir / "a").string()});
  auto b = base;
  b.insert(b.end(), {"--out", (dir / "b").string()});
  REQUIRE(cli(a).code == 0);
  REQUIRE(cli(b).code == 0);
  CHECK(strip_timing(dir / "a" / "report.csv") == strip_timing(dir / "b" / "report.csv"));
  CHECK(slurp(dir / "a" / "x.mtx") == slurp(dir / "b" / "x.mtx"));

  const auto rep = cli({"replay", "--manifest", (dir / "a" / "manifest.json").string()});
  REQUIRE(rep.code == 0);
  CHECK(strip_timing(dir / "a" / "replay" / "report.csv") == strip_timing(dir / "a" / "report.csv"));
  CHECK(slurp(dir / "a" / "replay" / "x.mtx") == slurp(dir / "a" / "x.mtx"));
}

TEST_CASE("compare emits one Gl row plus one row per sketch size") {
  const auto dir = scratch("compare");
  const auto r = cli({"compare", "--gen", "convdiff", "--grid", "16", "--s", "4", "--ells", "30,60,100,identity",
                      "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto rows = read_csv(dir / "compare.csv");
  REQUIRE(rows.size() == 6);
  CHECK(rows[1][0] == "Gl-GMRES");
  CHECK(rows[5][1] == "identity");
  CHECK(rows[5][5] == rows[1][5]);  // Iter of the identity row equals Gl
  CHECK(r.out.find("Method") != std::string::npos);
  CHECK(fs::exists(dir / "compare.txt"));
}

TEST_CASE("sweep rows, plot and monotonicity check") {
  const auto dir = scratch("sweep");
  const auto plot = dir / "hist.svg";
  const auto r = cli({"sweep", "--grid", "12", "--s", "2", "--ells", "20,50,80", "--sketch", "sparsesign",
                      "--plot", plot.string(), "--check-monotone", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("monotone check: ok") != std::string::npos);
  const auto rows = read_csv(dir / "sweep.csv");
  CHECK(rows.size() == 5);  // header + baseline + 3
  const auto svg = slurp(plot);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  // every history in the emitted CSV is nonincreasing
  const auto hist = read_csv(dir / "histories.csv");
  for (std::size_t i = 2; i < hist.size(); ++i) {
    if (hist[i][4] == "0") continue;
    CHECK(std::stod(hist[i][5]) <= std::stod(hist[i - 1][5]) * (1 + 1e-12));
  }

  const auto s2 = scratch("sweep_s");
  CHECK(cli({"sweep", "--grid", "8", "--ells", "20", "--s-list", "1,3", "--out", s2.string()}).code == 0);
  CHECK(read_csv(s2 / "sweep.csv").size() == 5);
}
