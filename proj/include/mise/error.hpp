#pragma once

#include <stdexcept>
#include <string>

namespace mise {

/// Process exit codes used by the command-line tool.
enum class ExitCode : int {
    success = 0,
    input = 2,    // unreadable or unparseable input, insufficient data
    config = 3,   // invalid flag or configuration value
    numeric = 4,  // non-finite values during optimisation
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(ExitCode::input, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ExitCode::config, what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ExitCode::numeric, what) {}
};

/// A prediction record that could not be parsed. Carries the 1-based line number.
class RecordError : public InputError {
public:
    RecordError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class MarcError : public InputError {
public:
    using InputError::InputError;
};

/// Raised for MARC-8 (leader/09 = blank) records.
class UnsupportedEncodingError : public MarcError {
public:
    using MarcError::MarcError;
};

} // namespace mise
