// errors.hpp: exception types shared by all modules

#pragma once

#include <stdexcept>
#include <string>

namespace enaqt {

/// Malformed model input (bad indices, non-positive couplings, ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a formula.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Least-squares fit could not be formed.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integrator or decomposition failure.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace enaqt
