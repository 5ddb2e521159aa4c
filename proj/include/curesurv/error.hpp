#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curesurv {

/// Invalid or inconsistent input data (malformed files, violated preconditions on samples).
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
  DataError(const std::string& what, std::size_t row)
      : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}

  /// 1-based data row the error refers to, 0 when not row-specific.
  std::size_t row() const noexcept { return row_; }

private:
  std::size_t row_ = 0;
};

/// A computation could not produce a finite or well-defined result.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// No observation receives positive kernel weight at the requested point.
class EmptyNeighborhoodError : public NumericError {
public:
  explicit EmptyNeighborhoodError(const std::string& what) : NumericError(what) {}
};

}  // namespace curesurv
