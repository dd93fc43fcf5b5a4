#pragma once

#include <stdexcept>
#include <string>

namespace hypodecay {

// Base class for all library errors.
struct error : std::runtime_error {
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or out-of-domain input: wrong shapes, non-finite entries,
// asymmetric matrices where symmetry is required, bad parameter ranges.
// CLI exit code 2.
struct invalid_input_error : error {
  using error::error;
};

// Input is well-formed but violates a structural condition of the model
// (not positive stable, covariance not SPD, degeneracy condition failed,
// defective drift where a non-defective one is required, ...).
// CLI exit code 2.
struct condition_error : error {
  using error::error;
};

// A configured size guard was exceeded (dense tensor materialization,
// subspace dimension cap). CLI exit code 2.
struct resource_error : error {
  using error::error;
};

// Numerical failure: eigensolver non-convergence, singular linear system
// where a unique solution is guaranteed, residual beyond tolerance.
// CLI exit code 3.
struct numerical_error : error {
  using error::error;
};

}  // namespace hypodecay
