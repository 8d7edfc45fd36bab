#pragma once

#include <stdexcept>
#include <string>

namespace tdvmm {

// Base for every error raised by the library. Subclasses map onto the
// failure classes a caller may want to distinguish (the CLI maps them onto
// exit codes).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numeric argument is outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Inconsistent or missing configuration / fixture data.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed CSV / JSON input.
class IngestError : public Error {
 public:
  using Error::Error;
};

// A solver could not satisfy a constraint (e.g. redundancy cap exceeded).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// A table query outside the characterized grid.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class EmptySelectionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tdvmm
