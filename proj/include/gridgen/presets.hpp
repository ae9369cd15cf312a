#pragma once

#include <string>

#include "gridgen/errors.hpp"
#include "gridgen/generator.hpp"

namespace gridgen {

// Published parameter sets for the three reference grids. Node/edge counts
// match the real networks, so generation at these presets is large.
inline GenParams preset_params(const std::string& name) {
  GenParams p;
  if (name == "wi") {
    p.kappa = 2.5;
    p.alpha = 1.0;
    p.beta = 3.2;
    p.gamma = 2.5;
    p.eta = 2.0;
    p.nn = 10;
    p.mode = NetworkMode::large;
    p.n_target = 14302;
    p.m_target = 18769;
  } else if (name == "serc") {
    p.kappa = 3.0;
    p.alpha = 0.5;
    p.beta = 3.2;
    p.gamma = 2.5;
    p.eta = 2.0;
    p.nn = 5;
    p.mode = NetworkMode::large;
    p.n_target = 12946;
    p.m_target = 16658;
  } else if (name == "frcc") {
    p.kappa = 1.8;
    p.alpha = 0.5;
    p.beta = 2.5;
    p.gamma = 2.8;
    p.eta = 2.0;
    p.nn = 5;
    p.mode = NetworkMode::small;
    p.n_target = 1312;
    p.m_target = 1780;
  } else {
    throw input_error("unknown preset '" + name + "' (expected wi, serc or frcc)");
  }
  return p;
}

}  // namespace gridgen
