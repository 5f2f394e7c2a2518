#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace thetaforms {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible matrix or vector dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Request exceeds a documented size limit (enumeration size, norm bound, ...).
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

/// Characteristic has the wrong parity for the requested operation.
class ParityError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Cτ+D is numerically singular.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

/// The series cannot meet the tolerance within the radius cap.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Malformed external input (JSON files, CLI arguments).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Lattice search exceeded its node budget. Carries the partial statistics.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, std::uint64_t partial_count,
              std::uint64_t nodes)
      : Error(what), partial_count_(partial_count), nodes_(nodes) {}

  std::uint64_t partial_count() const noexcept { return partial_count_; }
  std::uint64_t nodes() const noexcept { return nodes_; }

 private:
  std::uint64_t partial_count_;
  std::uint64_t nodes_;
};

}  // namespace thetaforms
