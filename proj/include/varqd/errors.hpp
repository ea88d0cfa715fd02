#pragma once

#include <stdexcept>
#include <string>

namespace varqd {

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on incompatible grids or have mismatched dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Gram matrix of a tangent basis is too ill-conditioned to solve.
class DegenerateBasisError : public Error {
 public:
  DegenerateBasisError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

/// Skew (symplectic) matrix of a tangent basis is singular.
class DegenerateSymplecticError : public Error {
 public:
  DegenerateSymplecticError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

/// Grid quadrature no longer represents the state faithfully.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

/// Generic numerical failure (negative radicand, step underflow, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A wave packet leaks out of the computational box.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

/// Invalid user input. `field` names the offending configuration key.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Potential cannot be reduced to mean-field form for the requested particle count.
class UnsupportedPotentialError : public Error {
 public:
  using Error::Error;
};

}  // namespace varqd
