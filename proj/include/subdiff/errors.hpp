#pragma once

#include <stdexcept>
#include <string>

namespace subdiff {

/// Base class of all library errors. `exit_code()` is the process exit status
/// the CLI reports for this error category.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
};

/// Invalid user configuration (bad K, malformed schedule, inconsistent grids).
class ConfigError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Sizes/dimensions do not agree.
class ShapeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Input data unusable (non-finite samples, zero reference norm).
class DataError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

/// Solver breakdown, divergence or non-convergence.
class NumericError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

/// Operation called on an object in the wrong state (e.g. incomplete history).
class StateError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace subdiff
