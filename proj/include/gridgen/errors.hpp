#pragma once

#include <stdexcept>
#include <string>

namespace gridgen {

// Error categories map onto the CLI exit-code contract:
// input_error -> 2, numeric_error -> 3, graph_state_error -> 4.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad files, bad parameters, violated preconditions.
struct input_error : error {
  using error::error;
};

// Numerical failure (EM divergence, singular covariance, ...).
struct numeric_error : error {
  using error::error;
};

// Graph is in a state the requested operation cannot handle
// (e.g. exact path length on a disconnected graph).
struct graph_state_error : error {
  using error::error;
};

}  // namespace gridgen
