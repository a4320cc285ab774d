#pragma once

#include <stdexcept>
#include <string>

namespace gmspec {

// Every failure raised by the core library derives from Error; the C API maps
// the concrete type to a status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A formula or procedure that is only defined for a subset of inputs.
class Unsupported : public Error {
 public:
  using Error::Error;
};

// Exhaustive work that would exceed the configured desk-scale budget.
class Infeasible : public Error {
 public:
  using Error::Error;
};

// Integrator or quadrature breakdown; the message names the location.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// A structural or identity check that found a counterexample.
class VerificationFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace gmspec
