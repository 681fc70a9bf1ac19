#pragma once

#include <stdexcept>
#include <string>

namespace eeopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The constraint set is empty (e.g. lambda_min > lambda_max).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature ran out of subdivisions. Carries the best estimate.
class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double estimate, double error_bound)
      : NumericalError(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

/// A tabulated function was queried outside its sampled range.
class TableRangeError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace eeopt
