#pragma once

#include <stdexcept>
#include <string>

namespace cblab {

/// Malformed arguments: non-finite entries, shape mismatches, bad radii.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point outside the open unit ball where a function is undefined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Inconsistent function or space descriptors (e.g. uncertified functionals).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when certified upper and optimized lower bounds cross.
class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace cblab
