#pragma once

#include <stdexcept>
#include <string>

namespace eqp {

// Input outside the mathematical domain of an operation (negative premium,
// probability outside (0,1), non-finite argument, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A root finder was handed a bracket without a sign change.
class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An iterative method ran out of iterations or could not meet its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Price handed to an inversion lies outside the open no-arbitrage interval.
class OutOfBoundsError : public DomainError {
public:
    using DomainError::DomainError;
};

// Malformed grid, axis or run configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace eqp
