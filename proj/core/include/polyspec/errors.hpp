#pragma once

#include <stdexcept>
#include <string>

namespace polyspec {

/// Input rejected before any computation (bad shapes, out-of-range values).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A hypothesis of the underlying theorem is violated, e.g. a kernel whose
/// Fourier support reaches the injectivity radius.
class HypothesisViolation : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// An enumeration would exceed its configured work or memory cap.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline const char* version_string() noexcept { return POLYSPEC_VERSION_STRING; }

}  // namespace polyspec
