#pragma once

#include <stdexcept>
#include <string>

namespace ripsel {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Caller-side problem: parameter out of range, malformed input, violated precondition.
class InvalidInput : public Error {
public:
  using Error::Error;
};

/// The numerics failed: eigensolver non-convergence, barrier collision, selection breakdown.
class NumericalError : public Error {
public:
  using Error::Error;
};

} // namespace ripsel
