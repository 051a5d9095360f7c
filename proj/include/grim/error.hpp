#pragma once

#include <stdexcept>
#include <string>

namespace grim {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or run configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed, inconsistent or out-of-range input data (CLI exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not meet its contract (CLI exit code 4).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace grim
