#pragma once

#include <stdexcept>
#include <string>

namespace addcomp {

/// Malformed arguments: wrong lengths, out-of-range covariates, bad ids.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A structural requirement on the problem setup is not met
/// (dimension budget, half-trace condition on the variance space).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The sampled spaces violate E ∩ F = {0} at the working tolerance.
class DegenerateDesign : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace addcomp
