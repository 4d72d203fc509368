#pragma once

#include <stdexcept>
#include <string>

namespace swarm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vectors whose length does not match the declared (N, d).
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation (e.g. X < 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Parameters that violate a law's or model's preconditions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Two agents closer than the singular-configuration floor.
class SingularConfiguration : public Error {
 public:
  using Error::Error;
};

/// A right-hand side produced a non-finite value.
class NumericalBlowup : public Error {
 public:
  NumericalBlowup(const std::string& what, double t) : Error(what), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace swarm
