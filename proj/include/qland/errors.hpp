#pragma once

#include <stdexcept>
#include <string>

namespace qland {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (bad file, bad parameters).
class InputError : public Error {
public:
    using Error::Error;
};

/// Edge-list parse failure; carries the 1-based offending line.
class ParseError : public InputError {
public:
    enum class Kind { DuplicateEdge, SelfLoop, NonNumeric, OutOfRange, Malformed, Empty };

    ParseError(Kind kind, int line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), kind_(kind), line_(line) {}

    Kind kind() const noexcept { return kind_; }
    int line() const noexcept { return line_; }

private:
    Kind kind_;
    int line_;
};

/// Problem too large for exact enumeration / simulation.
class SizeError : public InputError {
public:
    using InputError::InputError;
};

/// File missing, unreadable or unwritable.
class IoError : public InputError {
public:
    using InputError::InputError;
};

/// Iterative method failed to converge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace qland
