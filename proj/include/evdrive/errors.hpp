#pragma once

#include <stdexcept>
#include <string>

namespace evdrive {

/// Base class of all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: invalid parameters, malformed files, contract violations.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Filesystem-level failure (missing file, unreadable stream).
class IoError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: infeasible synthesis, divergence, singular matrices.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace evdrive
