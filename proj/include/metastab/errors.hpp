#pragma once

#include <stdexcept>
#include <string>

namespace metastab {

// Process exit codes used by the CLI.
enum class ExitCode : int {
    kSuccess = 0,
    kInternal = 1,
    kInput = 2,
    kCap = 3,
    kPropertyViolation = 4,
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual ExitCode exit_code() const noexcept { return ExitCode::kInternal; }
};

/// Malformed or out-of-range user input (bad strategy, bad parameters, bad file).
class InputError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::kInput; }
};

/// An operation was called without something it needs (e.g. a potential table).
class PreconditionError : public InputError {
public:
    using InputError::InputError;
};

/// A size/enumeration cap was exceeded. The message names the cap and the alternative.
class CapError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::kCap; }
};

/// Iterative numerics failed to reach tolerance, or a solve was singular.
class NumericalError : public Error {
public:
    using Error::Error;
};

[[noreturn]] void throw_input(const std::string& what);

}  // namespace metastab
