#pragma once

#include <stdexcept>
#include <string>

namespace tvmax {

// Base of every error raised by the library. `kind()` is a short stable
// token that the CLI prints in its one-line error reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Non-finite or wrongly shaped data.
class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error("invalid-input", what) {}
};

// Out-of-range scalar parameter (negative lambda, non-positive tol, ...).
class InvalidParameter : public Error {
 public:
  explicit InvalidParameter(const std::string& what) : Error("invalid-parameter", what) {}
};

class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& what) : Error("invariant-violation", what) {}
};

// Problem too large for the brute-force solvers.
class UnsupportedSize : public Error {
 public:
  explicit UnsupportedSize(const std::string& what) : Error("unsupported-size", what) {}
};

// A reference solve did not certify itself; nothing may be asserted against it.
class OracleUncertified : public Error {
 public:
  explicit OracleUncertified(const std::string& what) : Error("oracle-uncertified", what) {}
};

}  // namespace tvmax
