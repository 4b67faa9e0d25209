#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bandchol {

using index_t = std::int64_t;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfBand : public Error {
 public:
  OutOfBand(index_t row, index_t col)
      : Error("element (" + std::to_string(row) + ", " + std::to_string(col) +
              ") is outside the stored lower band"),
        row_(row),
        col_(col) {}
  index_t row() const noexcept { return row_; }
  index_t col() const noexcept { return col_; }

 private:
  index_t row_;
  index_t col_;
};

class InvalidBandwidth : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class SingularFactor : public Error {
 public:
  using Error::Error;
};

/// Raised when a pivot is not strictly positive. `column()` is the global
/// column index (0-based) where factorization stopped.
class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(index_t column)
      : Error("matrix is not positive definite (non-positive pivot at column " +
              std::to_string(column) + ")"),
        column_(column) {}
  index_t column() const noexcept { return column_; }

 private:
  index_t column_;
};

class BandwidthNotDivisible : public Error {
 public:
  using Error::Error;
};

class GridTooSmall : public Error {
 public:
  using Error::Error;
};

class CountOverflow : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace bandchol
