#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmh {

/// Base class for all recoverable library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid hyperparameters, weights, presets or experiment specs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Target node sits alone in its community, so there is nothing to hide from.
class TrivialTargetError : public Error {
 public:
  using Error::Error;
};

/// A caller broke a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace cmh
