#pragma once

#include <stdexcept>
#include <string>

namespace specoarse {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input, bad arguments, unreadable or unwritable files.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: non-convergence, divergence, infeasible constraints.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace specoarse
