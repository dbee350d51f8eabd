#pragma once

#include <stdexcept>
#include <string>

namespace twobit {

/// Bad input: a precondition on an argument, flag or file contents was violated.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not reach its requested accuracy.
class AccuracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or incompatible binary file.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace twobit
