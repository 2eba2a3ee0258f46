#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cirs {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A quantity the iteration divides by vanished to working precision.
class BreakdownError : public Error {
 public:
  BreakdownError(const std::string& what, double magnitude)
      : Error(what), magnitude_(magnitude) {}

  double magnitude() const noexcept { return magnitude_; }

 private:
  double magnitude_;
};

/// Malformed input file; line() is 1-based, 0 when not attributable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Inconsistent solver/problem configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cirs
