#pragma once

#include <stdexcept>
#include <string>

namespace wignerlab {

// Bad grid, bad eta, malformed files, out-of-range inputs.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation-specific parameter constraints (mismatched grids, bad matrices).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input expected to be normalized is not.
class NormalizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An object fails a structural invariant (hermiticity, positivity, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wignerlab
