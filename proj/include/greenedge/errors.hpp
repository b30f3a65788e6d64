#pragma once

#include <stdexcept>

namespace greenedge {

/// Raised when a scenario file or parameter set violates a model invariant.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a control decision violates a feasibility constraint
/// (power demand above the battery budget, queue driven unstable, ...).
struct InfeasibleDecisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a solver produces a non-finite intermediate value or the
/// state space exceeds the enumeration cap.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace greenedge
