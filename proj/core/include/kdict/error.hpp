#pragma once

#include <stdexcept>
#include <string>

namespace kdict {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatch, out-of-range parameter,
/// non-finite input, unknown name.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A computation hit a numerically unsafe state (near-singular pivot,
/// failed factorization, diverging step configuration).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Input files or configuration could not be read or parsed. The message
/// carries the offending line or field.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace kdict
