#pragma once

#include <stdexcept>
#include <string>

namespace cavity_bell {

// Bad input: out-of-range parameters, malformed matrices, unknown options.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A parameter that is valid physically but not supported on the requested path
// (e.g. a nonzero coherent phase on the closed-form route).
class UnsupportedParameter : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Eigensolver failure, non-PSD spectrum beyond tolerance, and similar.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested photon-number truncation tolerance cannot be met.
class TruncationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace cavity_bell
