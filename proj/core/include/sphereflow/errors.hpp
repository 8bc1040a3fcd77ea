#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sphereflow {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or validation failure (bad dimension, p < 2, K <= 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A field whose grid shape does not match the domain it is used with.
class DomainMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Requested eigenbasis exceeds the configured node cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// An iterative method stopped before reaching its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, std::size_t iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

/// A time step that produced a non-finite or collapsed state.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration text or snapshot bytes.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace sphereflow
