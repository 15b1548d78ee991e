#pragma once

#include <stdexcept>
#include <string>

namespace nlsball {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user-facing parameter (dimension, exponent, grid size, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Input outside the range where the requested object exists.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Iterative solver failed to converge.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Shooting could not bracket the center value.
class BracketError : public SolverError {
public:
    using SolverError::SolverError;
};

/// Bisection ran out of iterations before reaching the requested width.
class PrecisionError : public SolverError {
public:
    double bracket_width;
    PrecisionError(const std::string& what, double width)
        : SolverError(what), bracket_width(width) {}
};

/// A linear system is singular beyond the conditioning threshold.
class ResolutionError : public SolverError {
public:
    using SolverError::SolverError;
};

/// Implicit time step whose inner iteration did not converge; retry with a smaller dt.
class StepSizeError : public SolverError {
public:
    double dt;
    StepSizeError(const std::string& what, double step) : SolverError(what), dt(step) {}
};

/// Malformed or unknown run-configuration entry.
class ConfigError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// A search window does not contain the requested feature.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Input that is zero or otherwise degenerate where a nontrivial one is required.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Large-parameter diagnostic requested outside the asymptotic regime.
class NotAsymptoticError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Too few points for the requested estimate.
class SizeError : public Error {
public:
    using Error::Error;
};

/// Operation requested on the wrong branch (focusing vs defocusing) or regime.
class ScopeError : public Error {
public:
    using Error::Error;
};

/// No point satisfies the requested constraint.
class NoSolutionError : public Error {
public:
    using Error::Error;
};

/// Time integration detected unbounded growth.
class BlowUpError : public Error {
public:
    double time;
    BlowUpError(const std::string& what, double t) : Error(what), time(t) {}
};

}  // namespace nlsball
