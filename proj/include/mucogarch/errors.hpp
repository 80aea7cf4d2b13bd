#pragma once

#include <stdexcept>
#include <string>

namespace mucogarch {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition or type invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Matrix is not positive semidefinite within tolerance.
class NotPsdError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// B fails the eigenvector condition-number test for diagonalizability.
class NotDiagonalizableError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Matrix exponential argument too large to evaluate safely.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// A computation produced a result that can only come from an internal
/// defect (e.g. a negative jump increment of u, a non-finite integrand).
class NumericalDefect : public Error {
 public:
  using Error::Error;
};

}  // namespace mucogarch
