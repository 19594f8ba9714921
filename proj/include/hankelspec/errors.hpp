#pragma once

#include <stdexcept>
#include <string>

namespace hankelspec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, malformed input, dimension mismatches.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An iterative method (quadrature, Lanczos) did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A request reaches below what the computed spectrum resolves.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace detail
}  // namespace hankelspec
