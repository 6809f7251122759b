#pragma once

#include <stdexcept>
#include <string>

namespace volterra {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation
/// (evaluation point outside a segment, s > t in a kernel query, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A structural parameter is out of range (quadrature size, spline order, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// The problem data violates the model assumptions (degenerate kernel
/// diagonal, unordered boundary curves, delay point ahead of time).
class ModelError : public Error {
public:
    using Error::Error;
};

/// A user-supplied function produced a non-finite value; the message carries
/// the offending abscissa.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, double abscissa)
        : Error(what), abscissa_(abscissa) {}
    double abscissa() const { return abscissa_; }

private:
    double abscissa_ = 0.0;
};

/// The linear segment system is singular or too ill-conditioned to trust.
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// Problem configuration is inconsistent or incomplete.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Expression or config text failed to parse; carries the byte offset.
class ParseError : public ConfigError {
public:
    ParseError(const std::string& what, std::size_t offset)
        : ConfigError(what), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_ = 0;
};

} // namespace volterra
