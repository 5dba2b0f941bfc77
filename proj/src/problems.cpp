#include "rgl/problems.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>
#include <utility>
#include <vector>

#include "rgl/errors.hpp"
#include "rgl/rng.hpp"

namespace rgl {

SparseMatrix gen_convdiff2d(std::size_t g, double nu, std::array<double, 2> wind) {
  if (g < 3) throw ParameterError("convdiff2d: grid must be >= 3, got " + std::to_string(g));
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ParameterError("convdiff2d: nu must be positive and finite");
  if (!std::isfinite(wind[0]) || !std::isfinite(wind[1])) throw ParameterError("convdiff2d: wind must be finite");

  const double h = 1.0 / static_cast<double>(g + 1);
  const double diff = nu / (h * h);
  const double cx = wind[0] / (2.0 * h);
  const double cy = wind[1] / (2.0 * h);
  const std::size_t n = g * g;

  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  row_ptr.reserve(n + 1);
  cols.reserve(5 * n);
  vals.reserve(5 * n);
  auto emit = [&](std::size_t c, double v) {
    cols.push_back(c);
    vals.push_back(v);
  };
  for (std::size_t j = 0; j < g; ++j) {
    for (std::size_t i = 0; i < g; ++i) {
      const std::size_t r = j * g + i;
      if (j > 0) emit(r - g, -diff - cy);
      if (i > 0) emit(r - 1, -diff - cx);
      emit(r, 4.0 * diff);
      if (i + 1 < g) emit(r + 1, -diff + cx);
      if (j + 1 < g) emit(r + g, -diff + cy);
      row_ptr.push_back(cols.size());
    }
  }
  return SparseMatrix(n, std::move(row_ptr), std::move(cols), std::move(vals));
}

double mesh_peclet(std::size_t g, double nu, std::array<double, 2> wind) {
  const double h = 1.0 / static_cast<double>(g + 1);
  return std::max(std::abs(wind[0]), std::abs(wind[1])) * h / (2.0 * nu);
}

BlockVector random_block(std::size_t n, std::size_t s, std::uint64_t seed, std::uint64_t stream) {
  BlockVector x(n, s);
  for (std::size_t j = 0; j < s; ++j) {
    KeyedStream rs(seed, stream, j);
    for (double& v : x.col(j)) v = 2.0 * rs.uniform() - 1.0;
  }
  return x;
}

RhsData gen_rhs(const SparseMatrix& a, const ProblemSpec& spec) {
  if (spec.s < 1) throw ParameterError("gen_rhs: s must be >= 1");
  if (spec.rhs == RhsMode::manufactured) {
    BlockVector xs = random_block(a.n(), spec.s, spec.seed, kSolutionStream);
    BlockVector b = spmm_block(a, xs);
    return {std::move(b), std::move(xs)};
  }
  return {random_block(a.n(), spec.s, spec.seed, kRhsStream), std::nullopt};
}

SparseMatrix load_matrix(const ProblemSpec& spec) {
  if (spec.generator == ProblemSpec::Generator::matrix_market) return mm_read(spec.matrix_path);
  return gen_convdiff2d(spec.grid, spec.nu, spec.wind);
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::size_t parse_index(std::string_view tok, std::size_t line, const char* what) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size()) {
    throw ParseError(std::string("invalid ") + what + " '" + std::string(tok) + "'", line);
  }
  return v;
}

double parse_value(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError("invalid value '" + std::string(tok) + "'", line);
  }
  return v;
}

struct Header {
  bool array = false;
  bool symmetric = false;
};

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line that is neither blank nor a comment.
  bool next_data(std::string& out) {
    while (std::getline(in_, out)) {
      ++line_;
      if (!out.empty() && out.back() == '\r') out.pop_back();
      const auto toks = split(out);
      if (toks.empty() || out.front() == '%') continue;
      return true;
    }
    return false;
  }
  bool first(std::string& out) {
    if (!std::getline(in_, out)) return false;
    ++line_;
    if (!out.empty() && out.back() == '\r') out.pop_back();
    return true;
  }
  std::size_t line() const noexcept { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

Header read_header(LineReader& reader) {
  std::string line;
  if (!reader.first(line)) throw ParseError("empty file", 1);
  const auto toks = split(line);
  if (toks.size() != 5 || lower(toks[0]) != "%%matrixmarket" || lower(toks[1]) != "matrix") {
    throw ParseError("expected '%%MatrixMarket matrix <format> <field> <symmetry>' header", 1);
  }
  Header h;
  const std::string format = lower(toks[2]);
  if (format == "array") {
    h.array = true;
  } else if (format != "coordinate") {
    throw ParseError("unsupported format '" + std::string(toks[2]) + "'", 1);
  }
  if (lower(toks[3]) != "real") throw ParseError("unsupported field '" + std::string(toks[3]) + "' (only real)", 1);
  const std::string sym = lower(toks[4]);
  if (sym == "symmetric") {
    h.symmetric = true;
  } else if (sym != "general") {
    throw ParseError("unsupported symmetry '" + std::string(toks[4]) + "'", 1);
  }
  return h;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open '" + path.string() + "' for reading", FileError::Kind::missing_input);
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot open '" + path.string() + "' for writing", FileError::Kind::output_failure);
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw FileError("write to '" + path.string() + "' failed", FileError::Kind::output_failure);
}

}  // namespace

SparseMatrix mm_read(std::istream& in) {
  LineReader reader(in);
  const Header h = read_header(reader);
  if (h.array) throw ParseError("expected coordinate format for a sparse matrix", 1);

  std::string line;
  if (!reader.next_data(line)) throw ParseError("missing size line", reader.line() + 1);
  const auto size = split(line);
  if (size.size() != 3) throw ParseError("size line must hold 'rows cols entries'", reader.line());
  const std::size_t rows = parse_index(size[0], reader.line(), "row count");
  const std::size_t cols = parse_index(size[1], reader.line(), "column count");
  const std::size_t nnz = parse_index(size[2], reader.line(), "entry count");
  if (rows != cols) throw ParseError("matrix must be square", reader.line());
  if (rows == 0) throw ParseError("matrix dimension must be >= 1", reader.line());
  if (nnz > rows * cols) throw ParseError("entry count exceeds rows * cols", reader.line());

  std::vector<SparseMatrix::Triplet> trips;
  trips.reserve(h.symmetric ? 2 * nnz : nnz);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::size_t count = 0;
  while (reader.next_data(line)) {
    const std::size_t ln = reader.line();
    if (count == nnz) throw ParseError("more entries than declared (" + std::to_string(nnz) + ")", ln);
    const auto toks = split(line);
    if (toks.size() != 3) throw ParseError("entry must hold 'row col value'", ln);
    const std::size_t i = parse_index(toks[0], ln, "row index");
    const std::size_t j = parse_index(toks[1], ln, "column index");
    if (i < 1 || i > rows || j < 1 || j > cols) {
      throw ParseError("index (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range", ln);
    }
    const double v = parse_value(toks[2], ln);
    if (h.symmetric && j > i) throw ParseError("symmetric file stores an upper-triangle entry", ln);
    if (!seen.emplace(i, j).second) {
      throw ParseError("duplicate entry (" + std::to_string(i) + ", " + std::to_string(j) + ")", ln);
    }
    trips.push_back({i - 1, j - 1, v});
    if (h.symmetric && i != j) trips.push_back({j - 1, i - 1, v});
    ++count;
  }
  if (count != nnz) {
    throw ParseError("expected " + std::to_string(nnz) + " entries, found " + std::to_string(count),
                     reader.line() + 1);
  }
  return SparseMatrix::from_triplets(rows, std::move(trips));
}

SparseMatrix mm_read(const std::filesystem::path& path) {
  auto in = open_input(path);
  return mm_read(in);
}

void mm_write(std::ostream& out, const SparseMatrix& a, bool symmetric) {
  if (symmetric && !a.is_symmetric()) throw ParameterError("mm_write: matrix is not symmetric");
  std::vector<SparseMatrix::Triplet> trips = a.triplets();
  if (symmetric) {
    std::erase_if(trips, [](const SparseMatrix::Triplet& t) { return t.col > t.row; });
  }
  out << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general") << '\n';
  out << a.n() << ' ' << a.n() << ' ' << trips.size() << '\n';
  char buf[64];
  for (const auto& t : trips) {
    const auto res = std::to_chars(buf, buf + sizeof buf, t.value, std::chars_format::general, 17);
    out << t.row + 1 << ' ' << t.col + 1 << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf))
        << '\n';
  }
}

void mm_write(const std::filesystem::path& path, const SparseMatrix& a, bool symmetric) {
  auto out = open_output(path);
  mm_write(out, a, symmetric);
  finish_output(out, path);
}

BlockVector mm_read_block(std::istream& in) {
  LineReader reader(in);
  const Header h = read_header(reader);
  if (!h.array) throw ParseError("expected array format for a dense block", 1);
  if (h.symmetric) throw ParseError("dense blocks must use general symmetry", 1);

  std::string line;
  if (!reader.next_data(line)) throw ParseError("missing size line", reader.line() + 1);
  const auto size = split(line);
  if (size.size() != 2) throw ParseError("size line must hold 'rows cols'", reader.line());
  const std::size_t rows = parse_index(size[0], reader.line(), "row count");
  const std::size_t cols = parse_index(size[1], reader.line(), "column count");
  if (rows == 0 || cols == 0) throw ParseError("block dimensions must be >= 1", reader.line());

  std::vector<double> data;
  data.reserve(rows * cols);
  while (reader.next_data(line)) {
    const std::size_t ln = reader.line();
    const auto toks = split(line);
    if (toks.size() != 1) throw ParseError("array entry must hold one value", ln);
    if (data.size() == rows * cols) throw ParseError("more values than rows * cols", ln);
    data.push_back(parse_value(toks[0], ln));
  }
  if (data.size() != rows * cols) {
    throw ParseError("expected " + std::to_string(rows * cols) + " values, found " + std::to_string(data.size()),
                     reader.line() + 1);
  }
  return BlockVector(rows, cols, std::move(data));
}

BlockVector mm_read_block(const std::filesystem::path& path) {
  auto in = open_input(path);
  return mm_read_block(in);
}

void mm_write_block(std::ostream& out, const BlockVector& x) {
  out << "%%MatrixMarket matrix array real general\n";
  out << x.rows() << ' ' << x.cols() << '\n';
  char buf[64];
  for (double v : x.data()) {
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    out << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
  }
}

void mm_write_block(const std::filesystem::path& path, const BlockVector& x) {
  auto out = open_output(path);
  mm_write_block(out, x);
  finish_output(out, path);
}

}  // namespace rgl
