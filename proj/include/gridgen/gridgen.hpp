#pragma once

// Synthetic spatially embedded power-grid networks: density estimation of
// node positions, tunable-weight spanning trees, reinforcement edges, and a
// structural metrics suite.

#include "gridgen/errors.hpp"
#include "gridgen/random.hpp"
#include "gridgen/geo.hpp"
#include "gridgen/graph.hpp"
#include "gridgen/grid_index.hpp"
#include "gridgen/ingest.hpp"
#include "gridgen/mixture.hpp"
#include "gridgen/generator.hpp"
#include "gridgen/metrics.hpp"
#include "gridgen/io.hpp"
#include "gridgen/presets.hpp"
