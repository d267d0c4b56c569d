#pragma once

#include <stdexcept>
#include <string>

namespace plcsynth {

// Base of every exception thrown by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed something that violates a documented precondition
// (dimension mismatch, malformed grid, bad label).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A CFR entry is exactly zero, so its log-magnitude does not exist.
class DegenerateChannel : public Error {
 public:
  using Error::Error;
};

// Model coefficients are missing, non-finite or out of their domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Eigendecomposition, fitting or other numerical machinery failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Not enough realizations (or samples) for the requested statistic.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

// Text input could not be parsed. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace plcsynth
