#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace surfi {

// Base for every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated an operation's precondition (bad length, bad band, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Malformed trace, manifest or config input. `line()` is 1-based, 0 when the
// error is not tied to a specific line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A spectrum had no usable peak (flat or all-zero segment).
class NoPeakError : public Error {
 public:
  using Error::Error;
};

}  // namespace surfi
