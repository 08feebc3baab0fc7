#pragma once

#include <stdexcept>
#include <string>

namespace losssense {

/// Bad parameter values (levels outside their range, malformed profiles, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data that fails validation; the message names the offending row or field.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Positions living on different spaces were combined.
class SpaceMismatch : public std::invalid_argument {
 public:
  SpaceMismatch() : std::invalid_argument("positions live on different probability spaces") {}
};

/// A root or maximizer could not be bracketed.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace losssense
