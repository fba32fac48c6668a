#pragma once

#include <stdexcept>
#include <string>

namespace ssctm {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The steady-state linear system is (numerically) singular, e.g. because the
// rate matrix is not irreducible.
struct SingularSystemError : Error {
  using Error::Error;
};

// A prerequisite of the sufficient condition does not hold (nominal flow must
// stay strictly below every cell's average capacity).
struct PrerequisiteViolatedError : Error {
  using Error::Error;
};

// Vertex enumeration over the invariant box would exceed 2^26 points.
struct VertexBlowupError : Error {
  using Error::Error;
};

// An integrator step left the state space by more than the clamp tolerance.
struct StepTooLargeError : Error {
  using Error::Error;
};

// Replication statistics need at least two independent runs.
struct InsufficientReplicationsError : Error {
  using Error::Error;
};

}  // namespace ssctm
