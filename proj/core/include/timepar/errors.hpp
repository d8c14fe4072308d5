#pragma once

#include <stdexcept>
#include <string>

namespace timepar {

/// Invalid user input: bad sizes, out-of-range parameters, malformed files.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operand dimensions disagree.
class DimensionError : public InputError {
public:
    using InputError::InputError;
};

/// An operator expected to be symmetric positive definite is not.
class NonSpdError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operation needs exact spatial factorizations (diagnostic mode).
class DiagnosticModeRequired : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Dense eigen-solve refused because the problem exceeds the dense limit.
class DenseLimitExceeded : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Iterative solver residual blew up.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A proven spectral bound or invariant was violated by a measurement.
class BoundViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace timepar
