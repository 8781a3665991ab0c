#pragma once

#include <stdexcept>
#include <string>

namespace edpm {

// Base of every library error. The CLI maps the subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument lies outside the operation's domain (bad label, empty chain,
// mismatched lengths, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Stick-breaking fractions whose terminal entry is not exactly 1.
class InvalidStickError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A matrix that must be positive definite is not.
class MatrixError : public Error {
 public:
  using Error::Error;
};

// Non-finite state or total underflow of a categorical mass.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace edpm
