#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mstab {

/// Base class of every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Errors that an iterative solver converts into a Breakdown report
/// instead of letting them escape; the caller decides the restart policy.
struct BreakdownError : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

/// A pivot of the s x s projection system collapsed; IDR breakdown.
struct SingularProjection : BreakdownError {
  using BreakdownError::BreakdownError;
};

/// The stabilization least-squares block lost column rank.
struct RankDeficient : BreakdownError {
  using BreakdownError::BreakdownError;
};

/// A shifted operator (I - omega * A^H) turned out singular.
struct ShiftSingular : Error {
  using Error::Error;
};

struct ZeroPivot : Error {
  explicit ZeroPivot(std::size_t row)
      : Error("zero pivot in row " + std::to_string(row)), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

struct FingerprintMismatch : Error {
  using Error::Error;
};

struct StaleData : Error {
  using Error::Error;
};

struct MissingOmegas : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace mstab
