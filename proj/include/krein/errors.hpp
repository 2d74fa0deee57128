#pragma once

#include <stdexcept>
#include <string>

namespace krein {

struct KreinError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// z sits on the cut (-inf, 0] of the principal square root.
struct BranchCutError : KreinError {
  using KreinError::KreinError;
};

struct DimensionError : KreinError {
  using KreinError::KreinError;
};

// A spectral argument is an eigenvalue of the free operator.
struct ResolventSetError : KreinError {
  using KreinError::KreinError;
};

// Theta + Gamma(z) failed the invertibility criterion.
struct GammaSingularError : KreinError {
  GammaSingularError(const std::string& what, double sigma_min)
      : KreinError(what), smallest_singular_value(sigma_min) {}
  double smallest_singular_value;
};

struct DegenerateInputError : KreinError {
  using KreinError::KreinError;
};

// Input violates a type invariant (non-Hermitian Theta, repeated centers, ...).
struct ContractViolation : KreinError {
  using KreinError::KreinError;
};

struct DomainError : KreinError {
  using KreinError::KreinError;
};

struct IntervalError : KreinError {
  using KreinError::KreinError;
};

struct QuadratureError : KreinError {
  using KreinError::KreinError;
};

struct EpsilonRangeError : KreinError {
  using KreinError::KreinError;
};

struct SelfIntersectionError : KreinError {
  using KreinError::KreinError;
};

struct ConfigError : KreinError {
  using KreinError::KreinError;
};

}  // namespace krein
