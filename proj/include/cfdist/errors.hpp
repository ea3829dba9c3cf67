#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cfdist {

/// Base class for all library errors. `kind()` is a stable machine-readable
/// tag ("DomainError", "PoleError", ...) suitable for structured error output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Invalid parameter value (non-positive degrees of freedom, empty weight
/// list, weight sum off unity, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message) : Error("DomainError", message) {}
};

/// Argument hit a pole of the gamma function (non-positive integer).
class PoleError : public Error {
 public:
  explicit PoleError(const std::string& message) : Error("PoleError", message) {}
};

/// A computation produced a non-finite value.
class OverflowError : public Error {
 public:
  explicit OverflowError(const std::string& message) : Error("OverflowError", message) {}
};

/// Numerical moment estimation failed (non-positive variance estimate or a
/// characteristic function whose modulus never decays).
class MomentError : public Error {
 public:
  explicit MomentError(const std::string& message) : Error("MomentError", message) {}
};

/// Root finding did not reach the requested tolerance within the iteration
/// budget.
class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& message) : Error("ConvergenceError", message) {}
};

}  // namespace cfdist
