#pragma once

#include <stdexcept>
#include <string>

namespace hpeig {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid configuration / problem description.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Factorization or eigensolver failure.
class SolverError : public Error {
public:
  using Error::Error;
};

/// Invalid argument to a numerical routine (out of range, wrong size, ...).
class ArgumentError : public Error {
public:
  using Error::Error;
};

} // namespace hpeig
