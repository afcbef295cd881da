#pragma once

#include <stdexcept>
#include <string>

namespace hessrad {

// Base for every error thrown by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid argument values (dimensions, tolerances, grid sizes).
class ParameterError : public Error {
public:
  using Error::Error;
};

// Evaluation requested where the formula has no real value.
class DomainError : public Error {
public:
  using Error::Error;
};

// Root finding: endpoints do not bracket a sign change.
class NoBracketError : public Error {
public:
  using Error::Error;
};

class MaxIterError : public Error {
public:
  using Error::Error;
};

// gamma at or below the blow-up endpoint of the profile.
class OutsideDomainError : public Error {
public:
  using Error::Error;
};

class StiffStartError : public Error {
public:
  using Error::Error;
};

class NonConvergenceError : public Error {
public:
  using Error::Error;
};

// Monotone inversion target outside the attainable range.
class RangeError : public Error {
public:
  using Error::Error;
};

class DivergenceError : public Error {
public:
  using Error::Error;
};

class ExtrapolationError : public Error {
public:
  using Error::Error;
};

class ToleranceError : public Error {
public:
  using Error::Error;
};

class AdmissibilityError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

} // namespace hessrad
