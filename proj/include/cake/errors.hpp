#ifndef CAKE_ERRORS_HPP
#define CAKE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cake {

struct CakeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Geometry / shape arithmetic violations (non-dividing factors, mismatched cubes).
struct DimensionError : CakeError {
  using CakeError::CakeError;
};

// Malformed or truncated container files (VCUB / MSKS / FLOW / PGM).
struct FormatError : CakeError {
  using CakeError::CakeError;
};

// Metric denominators that vanish (all-zero truth on the requested region).
struct NormalizationError : CakeError {
  using CakeError::CakeError;
};

// Dual-scale masks need an even number of pixels per block to split half/half.
struct BlockParityError : CakeError {
  using CakeError::CakeError;
};

// Operation requires a specific mask family (binary remap, DSM coarse recovery).
struct UnsupportedMaskError : CakeError {
  using CakeError::CakeError;
};

struct InvalidFlowError : CakeError {
  using CakeError::CakeError;
};

// Solver produced a non-finite objective.
struct DivergenceError : CakeError {
  using CakeError::CakeError;
};

// Constraint pair cannot be met within the iteration budget.
struct InfeasibleError : CakeError {
  using CakeError::CakeError;
};

// A pipeline stage is missing an upstream artifact.
struct StageDependencyError : CakeError {
  using CakeError::CakeError;
};

struct ConfigError : CakeError {
  using CakeError::CakeError;
};

}  // namespace cake

#endif
