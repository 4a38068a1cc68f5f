#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hsolve {

enum class ErrorKind {
  config,
  not_spd,
  singular_block,
  numerical,
  not_converged,
  residency,
  format,
  version_mismatch,
  truncated_file,
  io,
};

// Stable machine-readable name, used for the CLI status column.
const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorKind::config, message) {}
};

// A non-positive (or NaN) pivot was hit while factoring a diagonal block.
// block_row is -1 when the failing block's position is unknown to the kernel;
// the factorization orchestrator fills it in.
class NotSpdError : public Error {
public:
  NotSpdError(std::ptrdiff_t block_row, std::size_t pivot_index)
      : Error(ErrorKind::not_spd,
              "matrix is not positive definite (block row " +
                  std::to_string(block_row) + ", pivot " +
                  std::to_string(pivot_index) + ")"),
        block_row_(block_row),
        pivot_index_(pivot_index) {}

  std::ptrdiff_t block_row() const { return block_row_; }
  std::size_t pivot_index() const { return pivot_index_; }

private:
  std::ptrdiff_t block_row_;
  std::size_t pivot_index_;
};

class SingularBlockError : public Error {
public:
  explicit SingularBlockError(std::size_t diagonal_index)
      : Error(ErrorKind::singular_block,
              "triangular block has zero or NaN diagonal at index " +
                  std::to_string(diagonal_index)),
        diagonal_index_(diagonal_index) {}

  std::size_t diagonal_index() const { return diagonal_index_; }

private:
  std::size_t diagonal_index_;
};

class NumericalError : public Error {
public:
  explicit NumericalError(const std::string& message)
      : Error(ErrorKind::numerical, message) {}
};

// A task declared a region that is not resident in the target executor's
// memory space.
class ResidencyError : public Error {
public:
  explicit ResidencyError(const std::string& message)
      : Error(ErrorKind::residency, message) {}
};

class FormatError : public Error {
public:
  explicit FormatError(const std::string& message)
      : Error(ErrorKind::format, message) {}
};

class VersionMismatchError : public Error {
public:
  VersionMismatchError(unsigned expected, unsigned actual)
      : Error(ErrorKind::version_mismatch,
              "unsupported file version " + std::to_string(actual) +
                  " (expected " + std::to_string(expected) + ")") {}
};

class TruncatedFileError : public Error {
public:
  TruncatedFileError(std::uint64_t expected_bytes, std::uint64_t actual_bytes)
      : Error(ErrorKind::truncated_file,
              "file truncated: expected " + std::to_string(expected_bytes) +
                  " bytes, got " + std::to_string(actual_bytes)),
        expected_bytes_(expected_bytes),
        actual_bytes_(actual_bytes) {}

  std::uint64_t expected_bytes() const { return expected_bytes_; }
  std::uint64_t actual_bytes() const { return actual_bytes_; }

private:
  std::uint64_t expected_bytes_;
  std::uint64_t actual_bytes_;
};

class IoError : public Error {
public:
  explicit IoError(const std::string& message)
      : Error(ErrorKind::io, message) {}
};

}  // namespace hsolve
