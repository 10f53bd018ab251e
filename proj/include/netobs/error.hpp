#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netobs {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed edge list or experiment spec; line is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Caller violated an operation's precondition (bad node, failed sensor not in set, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Graph does not satisfy a structural hypothesis, e.g. connectivity.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

class InvalidMatchingError : public Error {
 public:
  using Error::Error;
};

// Non-finite value met in a numeric recursion; iteration is 0-based.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::size_t iteration)
      : Error(what + " at iteration " + std::to_string(iteration)), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace netobs
