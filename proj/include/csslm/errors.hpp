#pragma once

#include <stdexcept>
#include <string>

namespace csslm {

// Malformed or inconsistent input data (files, labels, dimensions).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Hyperparameters fall in the a-priori unbounded region: the objective has
// no finite minimum regardless of the data, so training refuses to start.
struct UnboundedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical solver failed to certify an optimum (divergence, infeasibility,
// iteration limit, or a post-solve check that did not pass).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace csslm
