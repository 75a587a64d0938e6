#pragma once

#include <stdexcept>
#include <string>

namespace rbcd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: length mismatches, non-finite data, out-of-range
// parameters.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// The request is well formed but the problem lies outside what the
// toolkit can handle analytically (e.g. a non-unique optimum).
class UnsupportedProblem : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A block oracle threw or produced a non-finite value during a solve.
class OracleFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace rbcd
