#pragma once

#include <stdexcept>
#include <string>

namespace sausage {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (empty domain, negative time, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A graph that must be connected is not.
class DisconnectedError : public Error {
 public:
  using Error::Error;
};

/// A size cap (vertex count, state count, dense-solver limit) was exceeded.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver stopped before reaching its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace sausage
