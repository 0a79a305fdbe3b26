#pragma once

#include <stdexcept>
#include <string>

namespace remest {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid construction arguments, malformed config files, dimension
// mismatches.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: fixed-point iteration did not converge, singular
// innovation covariance, non-finite intermediate.
class NumericError : public Error {
 public:
  using Error::Error;
};

// An enumeration or solver size cap was exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// The game instance falls outside the closed-form solver's domain
// (e.g. players with unequal cap ratios in the correlated solver).
class UnsupportedGameError : public Error {
 public:
  using Error::Error;
};

// A profile violates the energy caps it is being checked against.
class InfeasibleProfileError : public Error {
 public:
  using Error::Error;
};

// Filesystem / output errors.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace remest
