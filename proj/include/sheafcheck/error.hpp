#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sheafcheck {

/// Malformed or out-of-contract input. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Input text that failed to parse, tagged with a 1-based line number
/// (0 when the error is not tied to a line).
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InputError(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A problem exceeds the exhaustive desk-scale bounds.
class LimitError : public InputError {
 public:
  explicit LimitError(const std::string& what) : InputError(what) {}
};

/// Hard constraints that admit no model.
class UnsatisfiableError : public InputError {
 public:
  explicit UnsatisfiableError(const std::string& what) : InputError(what) {}
};

/// Missing credentials or other environment problems (exit code 3).
class EnvironmentError : public std::runtime_error {
 public:
  explicit EnvironmentError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sheafcheck
