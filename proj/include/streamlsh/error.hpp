#pragma once

#include <stdexcept>
#include <string>

namespace streamlsh {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation
/// (zero-norm vector, degenerate integration interval, 0/0 closed form).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The caller violated the streaming protocol: out-of-order ticks,
/// duplicate item ids, ages in the future.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// A configuration or parameter failed validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input record. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An internal invariant did not hold. Always a bug.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace streamlsh
