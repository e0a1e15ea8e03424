#ifndef RISLAB_ERRORS_HPP
#define RISLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rislab {

/// Argument outside the mathematical domain of an operation (angles, W(x), ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed load, route, schedule or scenario description.
class ConfigurationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Base for failures of the numerical model itself.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Loop gain of load and array reaches or exceeds one.
class InstabilityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Coupling matrix violates B <= I beyond tolerance.
class InadmissiblePatternError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Unreadable input or unwritable output.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rislab

#endif  // RISLAB_ERRORS_HPP
