#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rgl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions do not conform.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A configuration value is out of its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must have full rank does not.
class RankError : public Error {
 public:
  using Error::Error;
};

/// Input that makes the requested operation meaningless (e.g. zero residual
/// handed to Arnoldi).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// The sketch annihilated a nonzero block, so the sketched semi-norm cannot
/// be used for normalization.
class SemiNormDegeneracyError : public Error {
 public:
  using Error::Error;
};

/// A Gram or eigenvector matrix is too ill-conditioned to be inverted.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

/// Allocation would exceed the configured memory budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// NaN or Inf appeared during an iteration.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, std::size_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Malformed input file; `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// File could not be opened for reading or writing.
class FileError : public Error {
 public:
  enum class Kind { missing_input, output_failure };

  FileError(const std::string& what, Kind kind) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace rgl
