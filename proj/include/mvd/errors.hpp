#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mvd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Raised when the mesh ratios violate lambda + 2r <= 1.
class StabilityViolation : public Error {
public:
    StabilityViolation(double lambda, double r)
        : Error("stability threshold violated: lambda + 2r = " + std::to_string(lambda + 2.0 * r)
                + " > 1 (lambda = " + std::to_string(lambda) + ", r = " + std::to_string(r) + ")"),
          lambda_(lambda),
          r_(r) {}

    double lambda() const noexcept { return lambda_; }
    double r() const noexcept { return r_; }
    double sum() const noexcept { return lambda_ + 2.0 * r_; }

private:
    double lambda_;
    double r_;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t position, const std::string& message)
        : Error("parse error at position " + std::to_string(position) + ": " + message),
          position_(position),
          message_(message) {}

    std::size_t position() const noexcept { return position_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::size_t position_;
    std::string message_;
};

class EvalError : public Error {
public:
    using Error::Error;
};

class UnknownProblem : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

/// A NaN or Inf appeared in the discrete state; carries the offending time level.
class NonFiniteState : public Error {
public:
    explicit NonFiniteState(std::size_t level)
        : Error("non-finite state at time level " + std::to_string(level)), level_(level) {}

    std::size_t level() const noexcept { return level_; }

private:
    std::size_t level_;
};

class AlignmentError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(std::size_t line, const std::string& message)
        : Error("config line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace mvd
