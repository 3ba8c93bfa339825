#pragma once

#include <stdexcept>
#include <string>

namespace qmud {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Register or problem size outside the configured limits.
class SizeError : public Error {
public:
    using Error::Error;
};

// Operand dimensions/lengths do not line up.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Argument outside its mathematical domain (probability > 1, index >= 2^K, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Matrix failed a structural check (e.g. not unitary).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Inconsistent or malformed scenario / experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace qmud
