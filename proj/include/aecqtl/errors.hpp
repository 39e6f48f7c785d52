#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aecqtl {

/// Base class for all recoverable errors raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid sizes, indices, flags, or mismatched dimensions.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Input that a mathematical operation is undefined on (e.g. a zero vector
/// handed to amplitude encoding).
class DegenerateInputError : public Error {
  public:
    using Error::Error;
};

/// Malformed text input. `line()` is 1-based; 0 when no line applies.
class ParseError : public Error {
  public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// Training diverged (non-finite loss or gradient).
class TrainingError : public Error {
  public:
    using Error::Error;
};

} // namespace aecqtl
