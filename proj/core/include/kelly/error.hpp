#pragma once

#include <stdexcept>
#include <string>

namespace kelly {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input: bad files, schema violations,
/// vectors of the wrong size, weights outside the simplex.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A well-formed request that the model cannot satisfy (too-large
/// enumerations, non-finite objectives, series too short for a window).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Raised by exact compounding when S^n exceeds the enumeration cap.
/// Callers catch this to fall back to sampling.
class EnumerationCapExceeded : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace kelly
