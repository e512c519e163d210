#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace paircorr {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument is outside the mathematical domain of the operation
/// (non-finite input, sigma <= 0, f outside [0,1], negative momentum difference ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The triplet channel was requested at a relative momentum where the
/// antisymmetric state vanishes identically (p_tilde / sigma below threshold).
class DegenerateChannelError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A numerical integral did not reach its target tolerance within the sample
/// budget. The best available estimate is kept.
class ToleranceNotMetError : public Error {
public:
    ToleranceNotMetError(const std::string& what, double value, double est_error,
                         std::size_t samples_used)
        : Error(what), value_(value), est_error_(est_error), samples_used_(samples_used) {}

    double value() const noexcept { return value_; }
    double est_error() const noexcept { return est_error_; }
    std::size_t samples_used() const noexcept { return samples_used_; }

private:
    double value_;
    double est_error_;
    std::size_t samples_used_;
};

/// Too few data points for the requested number of free parameters.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// The model output does not depend on at least one free parameter anywhere
/// in the search box, so that parameter cannot be estimated.
class InsufficientSensitivityError : public Error {
public:
    using Error::Error;
};

/// The approximation-error metric is undefined (all data values zero).
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. Carries the 1-based line number of the offending row.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Error raised while evaluating one element of a grid; `index()` is the
/// position of the failing grid point.
class GridPointError : public Error {
public:
    GridPointError(const std::string& what, std::size_t index)
        : Error("grid point " + std::to_string(index) + ": " + what), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

} // namespace paircorr
