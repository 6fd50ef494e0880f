#pragma once

#include <stdexcept>
#include <string>

namespace ksfrag {

/// Raised when an input violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A basis or problem size that cannot be represented or would not fit in
/// memory. The message carries the required capacity.
class CapacityError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Raised by a malformed or inconsistent experiment configuration.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Raised when a numerical postcondition cannot be met (asymmetric input,
/// non-convergence, symmetry violation, empty energy window).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Perturbation V couples (quasi-)degenerate levels of H0.
class ResonanceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace ksfrag
