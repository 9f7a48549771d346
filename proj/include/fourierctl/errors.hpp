#pragma once

#include <stdexcept>
#include <string>

namespace fourierctl {

/// Vector or array length does not match what the operation expects.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A precondition stated by an operation was violated by the caller.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The raw trigonometric polynomial has (numerically) no variation, so it
/// cannot be rescaled onto [0, 1].
class DegenerateShape : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The contact-mode mass matrix became singular.
class SingularDynamics : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Step size collapsed below the representable resolution of the time axis.
class StiffnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too many discrete transitions in one integration.
class EventStormError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration document.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fourierctl
