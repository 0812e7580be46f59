#pragma once

#include <stdexcept>
#include <string>

namespace lorenz {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure (series, root finder, optimizer) did not meet its
/// tolerance within the iteration budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A quantity that is finite only under some parameter condition was
/// requested outside that condition (e.g. 2F1 at z = 1 with c - a - b <= 0).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature ran out of subdivisions. Carries the best estimate and
/// the error bound achieved so far.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_bound)
      : Error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

class NoSignChangeError : public Error {
 public:
  using Error::Error;
};

/// An operation does not support the requested Lorenz family.
class UnsupportedFamilyError : public Error {
 public:
  using Error::Error;
};

/// A grouped dataset violates its invariants.
class DataError : public Error {
 public:
  using Error::Error;
};

/// The quantile function implied by a model is not nondecreasing, so the
/// headcount equation has no unique solution.
class NonMonotoneQuantileError : public Error {
 public:
  using Error::Error;
};

/// A measure is not defined for the model (e.g. negative Lorenz ordinates).
class IllDefinedMeasureError : public Error {
 public:
  using Error::Error;
};

}  // namespace lorenz
