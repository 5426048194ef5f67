#pragma once

#include <stdexcept>
#include <string>

namespace bincover {

// Base of all library errors. Two broad classes matter to callers:
// ValidationError (bad input) and CapExceededError (instance too big for
// the exact path). The CLI maps them to distinct exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct CapExceededError : Error {
    using Error::Error;
};

struct EmptyListError : ValidationError {
    EmptyListError() : ValidationError("empty item list") {}
};

struct InvalidItemError : ValidationError {
    using ValidationError::ValidationError;
};

struct NotRealizableError : ValidationError {
    using ValidationError::ValidationError;
};

struct NeverClosesError : ValidationError {
    NeverClosesError() : ValidationError("distribution is a point mass at 0; no bin ever closes") {}
};

struct NotPerfectConfigurationError : ValidationError {
    using ValidationError::ValidationError;
};

struct OutOfValidatedRangeError : ValidationError {
    using ValidationError::ValidationError;
};

struct NotApplicableError : ValidationError {
    using ValidationError::ValidationError;
};

// Chain has period >= 2; the stationary solver refuses and the caller takes
// the periodic shortcut instead.
struct PeriodicError : Error {
    using Error::Error;
};

struct StateExplosionError : CapExceededError {
    using CapExceededError::CapExceededError;
};

struct TooLargeError : CapExceededError {
    using CapExceededError::CapExceededError;
};

} // namespace bincover
