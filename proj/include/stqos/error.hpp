#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stqos {

// Invalid scenario parameters or an invariant violated by user input.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed config text. what() already carries "<source>:<line>: ".
class ParseError : public ConfigError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& message)
      : ConfigError(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Too few usable points for a tail fit.
class InsufficientDataError : public std::runtime_error {
 public:
  InsufficientDataError(std::size_t usable, std::size_t required)
      : std::runtime_error("insufficient data for fit: " + std::to_string(usable) +
                           " usable points, need " + std::to_string(required)),
        usable_(usable) {}

  std::size_t usable() const noexcept { return usable_; }

 private:
  std::size_t usable_;
};

// A CSV input lacks a required column.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stqos
