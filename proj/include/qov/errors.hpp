#pragma once

#include <stdexcept>
#include <string>

namespace qov {

// Base class for all domain errors thrown by this library. Plain argument
// misuse (negative cutoffs, malformed options, ...) throws std::invalid_argument.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A coherent amplitude whose photon-number tail does not fit below the cutoff.
struct AmplitudeTooLargeForCutoff : Error {
  using Error::Error;
};

// More polynomial zeros requested than the truncated space can represent.
struct TooManyZerosForCutoff : Error {
  using Error::Error;
};

// An operation that needs a nonzero state received the zero vector.
struct ZeroState : Error {
  using Error::Error;
};

// The state has no excitation above |0>, so it has no zeros to work with.
struct VacuumOnly : Error {
  using Error::Error;
};

// Iterative root finding hit its iteration cap with residuals out of tolerance.
struct NoConvergence : Error {
  double best_residual;
  NoConvergence(const std::string& msg, double residual)
      : Error(msg), best_residual(residual) {}
};

// The designed cascade failed its numerical self-check against the target.
struct DesignVerificationFailed : Error {
  double achieved_fidelity;
  DesignVerificationFailed(const std::string& msg, double fidelity)
      : Error(msg), achieved_fidelity(fidelity) {}
};

// A density operator violated hermiticity/trace/positivity beyond tolerance.
struct NotAState : Error {
  using Error::Error;
};

// A measured/joint probability exceeds the efficiency it must be bounded by.
struct InconsistentProbability : Error {
  using Error::Error;
};

// A phase-state parameter sits at a singular point (e.g. sin(phi) = 0).
struct DegeneratePhase : Error {
  using Error::Error;
};

// Two Fock-space objects with different cutoffs were combined.
struct SpaceMismatch : Error {
  using Error::Error;
};

}  // namespace qov
