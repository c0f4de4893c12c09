#pragma once

#include <stdexcept>
#include <string>

namespace adaptnet {

// Bad inputs: malformed matrices, inconsistent dimensions, rejected options.
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Computations that fail at runtime despite valid inputs (defective spectra,
// non-convergent fixed-point iterations, unstable bound recursions).
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterate left the representable range (entry above 1e12 or non-finite).
// `trial` is -1 when the failure happened outside a Monte Carlo run.
struct divergence_error : std::runtime_error {
  long iteration;
  long trial;

  divergence_error(const std::string& msg, long iter, long trial_index = -1)
      : std::runtime_error(msg), iteration(iter), trial(trial_index) {}
};

}  // namespace adaptnet
