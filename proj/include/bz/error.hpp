#pragma once

#include <stdexcept>
#include <string>

namespace bz {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on arguments was violated (bad parameters, wrong ordering, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation too close to the pole u = -q of the kinetic term.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure (root finder, Picard loop, hitting-time search)
/// failed to reach its target.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A proven a-priori bound was violated at runtime beyond its tolerance.
class BoundViolation : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appeared in a field.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace bz
