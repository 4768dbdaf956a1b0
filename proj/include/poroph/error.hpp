#pragma once

#include <stdexcept>
#include <string>

namespace poroph {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit together.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A symmetry, skew-symmetry or definiteness requirement is violated.
class StructureError : public Error {
public:
    explicit StructureError(const std::string& what, double offending_value = 0.0)
        : Error(what), offending_value_(offending_value) {}

    /// Typically the most negative eigenvalue or the largest asymmetry found.
    [[nodiscard]] double offending_value() const noexcept { return offending_value_; }

private:
    double offending_value_;
};

/// A linear system or pencil is numerically singular.
class SingularError : public Error {
public:
    using Error::Error;
};

/// A state does not satisfy the algebraic equations it is required to satisfy.
class InconsistentStateError : public Error {
public:
    using Error::Error;
};

/// A coefficient function left its admissible range.
class BoundViolationError : public Error {
public:
    using Error::Error;
};

/// Invalid user configuration (scenario files, flags).
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// A time step could not be taken.
class StepError : public Error {
public:
    StepError(const std::string& what, long step) : Error(what), step_(step) {}
    [[nodiscard]] long step() const noexcept { return step_; }

private:
    long step_;
};

}  // namespace poroph
