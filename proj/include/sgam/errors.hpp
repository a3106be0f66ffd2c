#pragma once

#include <stdexcept>
#include <string>

namespace sgam {

// Bad user input: out-of-domain values, malformed files, invalid flags.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A value outside the domain of a function (e.g. a basis point outside [0,1]).
class DomainError : public InputError {
 public:
  using InputError::InputError;
};

class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

// Numerical failure inside an algorithm (divergence, exhausted retries).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sgam
