#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bseries {

/// Bad user input: malformed configuration, out-of-range parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A size or order above a configured cap.
class CapExceeded : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Evaluation left the domain of an elementary function (log/sqrt of a
/// nonpositive value, division by zero).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Expression syntax error; `offset` is the 0-based character position.
class ParseError : public ConfigError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : ConfigError(what + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace bseries
