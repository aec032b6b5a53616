#pragma once

#include <stdexcept>
#include <string>

namespace glacia {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a model function
/// (negative square-root argument, lambda < 0, y < 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Integrand denominator vanishes on the integration range.
class SingularIntegrandError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Requested value lies outside the range of an inverted function
/// (nullcline inversion, branch inversion).
class RangeError : public Error {
public:
    using Error::Error;
};

/// A structural assumption of the analysis does not hold
/// (no folds, several critical points, ...).
class AssumptionError : public Error {
public:
    using Error::Error;
};

/// Iterative procedure failed to converge within its budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Malformed or invariant-violating configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace glacia
