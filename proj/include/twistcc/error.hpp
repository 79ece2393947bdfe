#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace twistcc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration violates its invariants (n < 2, bad masses, wrong sizes).
class InvalidConfigError : public Error {
 public:
  using Error::Error;
};

/// Two bodies coincide. Indices are 1-based in the message and accessors.
class DistinctPointsError : public InvalidConfigError {
 public:
  DistinctPointsError(std::size_t i, std::size_t j)
      : InvalidConfigError("distinct-points violation: bodies " + std::to_string(i) +
                           " and " + std::to_string(j) + " coincide"),
        i_(i),
        j_(j) {}
  std::size_t first() const noexcept { return i_; }
  std::size_t second() const noexcept { return j_; }

 private:
  std::size_t i_;
  std::size_t j_;
};

/// The potential exponent is outside the domain of the requested operation.
class ExponentDomainError : public Error {
 public:
  using Error::Error;
};

/// Twist index pair with i == j or out of range.
class InvalidPairError : public Error {
 public:
  using Error::Error;
};

class InvalidFlowError : public Error {
 public:
  using Error::Error;
};

// Kite family failures.
class IndeterminateScaleError : public Error {
 public:
  using Error::Error;
};
class InfeasibleShapeError : public Error {
 public:
  using Error::Error;
};
class FamilyBoundaryError : public Error {
 public:
  using Error::Error;
};
class SymmetryViolationError : public Error {
 public:
  using Error::Error;
};
class IdentityInapplicableError : public Error {
 public:
  using Error::Error;
};

/// Interval operation outside its domain (division by an interval containing 0, ...).
class IntervalDomainError : public Error {
 public:
  using Error::Error;
};

/// Unreadable or malformed input file; line and column are 1-based, 0 when unknown.
class InputError : public Error {
 public:
  InputError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace twistcc
