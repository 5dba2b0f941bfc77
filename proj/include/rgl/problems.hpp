#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "rgl/block.hpp"

namespace rgl {

/// Five-point centered finite differences for -nu Lap(u) + w . grad(u) on
/// the unit square, g x g interior nodes, homogeneous Dirichlet boundary
/// eliminated. Node (i, j) (x index i, y index j) is row j * g + i.
SparseMatrix gen_convdiff2d(std::size_t g, double nu, std::array<double, 2> wind);

/// max(|wx|, |wy|) * h / (2 nu) with h = 1 / (g + 1). Centered convection
/// loses diagonal dominance when this exceeds 1.
double mesh_peclet(std::size_t g, double nu, std::array<double, 2> wind);

enum class RhsMode { random, manufactured };

struct ProblemSpec {
  enum class Generator { convdiff2d, matrix_market };
  Generator generator = Generator::convdiff2d;
  std::size_t grid = 64;
  std::filesystem::path matrix_path;
  double nu = 0.01;
  std::array<double, 2> wind{1.0, 1.0};
  RhsMode rhs = RhsMode::manufactured;
  std::size_t s = 1;
  std::uint64_t seed = 0;
};

struct RhsData {
  BlockVector b;
  std::optional<BlockVector> x_star;
};

/// Column j of X* (manufactured) or B (random) depends only on (seed, j),
/// with entries uniform in [-1, 1).
RhsData gen_rhs(const SparseMatrix& a, const ProblemSpec& spec);

/// n x s block with seeded column-keyed entries uniform in [-1, 1).
BlockVector random_block(std::size_t n, std::size_t s, std::uint64_t seed, std::uint64_t stream);

/// Builds A for a spec (generating or reading it).
SparseMatrix load_matrix(const ProblemSpec& spec);

// Matrix Market coordinate format, real field, general or symmetric.
// Symmetric files must store the lower triangle only; they are expanded on
// read. Values are written with 17 significant digits.
SparseMatrix mm_read(const std::filesystem::path& path);
SparseMatrix mm_read(std::istream& in);
void mm_write(const std::filesystem::path& path, const SparseMatrix& a, bool symmetric = false);
void mm_write(std::ostream& out, const SparseMatrix& a, bool symmetric = false);

// Dense blocks as Matrix Market arrays (column-major).
BlockVector mm_read_block(const std::filesystem::path& path);
BlockVector mm_read_block(std::istream& in);
void mm_write_block(const std::filesystem::path& path, const BlockVector& x);
void mm_write_block(std::ostream& out, const BlockVector& x);

}  // namespace rgl
