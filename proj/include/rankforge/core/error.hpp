#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rankforge {

struct Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input text. `line` is 1-based, 0 when not applicable.
struct ParseError : public Error {
  std::size_t line;
  ParseError(const std::string& message, std::size_t line_ = 0)
      : Error(line_ ? "line " + std::to_string(line_) + ": " + message : message),
        line(line_) {}
};

struct SchemaError : public ParseError {
  std::string key;
  SchemaError(const std::string& key_, std::size_t line_)
      : ParseError("missing required key \"" + key_ + "\"", line_), key(key_) {}
};

struct ValidationError : public Error {
  using Error::Error;
};

struct IoError : public Error {
  using Error::Error;
};

struct ConfigError : public Error {
  using Error::Error;
};

struct BudgetError : public Error {
  using Error::Error;
};

// Transport-level failure after exhausting retries.
struct BackendError : public Error {
  int attempts;
  BackendError(const std::string& message, int attempts_)
      : Error(message + " (after " + std::to_string(attempts_) + " attempt" +
              (attempts_ == 1 ? "" : "s") + ")"),
        attempts(attempts_) {}
};

struct TimeoutError : public BackendError {
  using BackendError::BackendError;
};

struct CredentialError : public Error {
  using Error::Error;
};

}  // namespace rankforge
