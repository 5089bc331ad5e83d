#pragma once

#include <stdexcept>
#include <string>

namespace paraspec {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed model specification (bad sizes, dangling indices, ...).
struct InvalidSpecError : Error {
    using Error::Error;
};

/// A symmetry the operation relies on does not hold (e.g. parity).
struct SymmetryError : Error {
    using Error::Error;
};

/// Eigensolver failed to converge; message carries the residual report.
struct SolverError : Error {
    using Error::Error;
};

/// PT gauge fixing failed (spontaneously broken phase or no real part).
struct GaugeError : Error {
    using Error::Error;
};

/// Gauge fixing refused: degenerate eigenvalue cluster or Re(v) = 0.
struct DegenerateGaugeError : GaugeError {
    using GaugeError::GaugeError;
};

/// Closed-form constructor called outside its validity domain.
struct DomainError : Error {
    using Error::Error;
};

/// Supplied parameters violate a constraint the formula assumes.
struct ConstraintError : Error {
    using Error::Error;
};

/// A state combination collapsed to (numerically) zero.
struct NullStateError : Error {
    using Error::Error;
};

/// A superposition failed its eigen-residual verification.
struct CorrespondenceError : Error {
    using Error::Error;
};

/// Range/overflow guard (e.g. matrix exponential of a huge generator).
struct RangeError : Error {
    using Error::Error;
};

/// CLI configuration document is invalid.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace paraspec
