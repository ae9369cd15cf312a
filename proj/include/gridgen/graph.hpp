#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <queue>
#include <unordered_set>
#include <vector>

#include "gridgen/errors.hpp"
#include "gridgen/geo.hpp"

namespace gridgen {

struct GraphNode {
  PlanarPoint pos;               // km
  std::optional<GeoPoint> geo;   // absent for synthetic graphs
};

struct GraphEdge {
  int u = 0;                           // canonical u < v
  int v = 0;
  std::optional<double> actual_km;     // polyline length when known
  int multiplicity = 1;                // parallel lines collapsed onto one edge
};

// Undirected simple graph whose nodes carry planar km positions and, for
// ingested grids, the original geographic coordinates.
struct SpatialGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  std::optional<GeoPoint> projection_center;  // absent marks a synthetic graph

  int node_count() const { return static_cast<int>(nodes.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
};

inline std::uint64_t edge_key(int u, int v) {
  const std::uint64_t a = static_cast<std::uint32_t>(std::min(u, v));
  const std::uint64_t b = static_cast<std::uint32_t>(std::max(u, v));
  return (a << 32) | b;
}

// Checks the structural invariants: endpoints in range, no self-loops, no
// duplicate pairs, canonical order, multiplicity >= 1.
inline void validate(const SpatialGraph& g) {
  const int n = g.node_count();
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(g.edges.size() * 2);
  for (const GraphEdge& e : g.edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw input_error("graph edge references a missing node");
    if (e.u == e.v) throw input_error("graph contains a self-loop");
    if (e.u > e.v) throw input_error("graph edge endpoints not in canonical order");
    if (e.multiplicity < 1) throw input_error("graph edge multiplicity < 1");
    if (!seen.insert(edge_key(e.u, e.v)).second)
      throw input_error("graph contains a duplicate edge pair");
  }
}

inline std::vector<std::vector<int>> adjacency(const SpatialGraph& g) {
  std::vector<std::vector<int>> adj(g.node_count());
  for (const GraphEdge& e : g.edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  return adj;
}

inline std::vector<int> degrees(const SpatialGraph& g) {
  std::vector<int> d(g.node_count(), 0);
  for (const GraphEdge& e : g.edges) {
    ++d[e.u];
    ++d[e.v];
  }
  return d;
}

// Component label per node (labels assigned in increasing order of the
// smallest node id in each component) and the number of components.
inline std::vector<int> component_labels(const SpatialGraph& g, int* count_out = nullptr) {
  const auto adj = adjacency(g);
  std::vector<int> label(g.node_count(), -1);
  int next = 0;
  for (int s = 0; s < g.node_count(); ++s) {
    if (label[s] != -1) continue;
    label[s] = next;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj[u]) {
        if (label[v] == -1) {
          label[v] = next;
          q.push(v);
        }
      }
    }
    ++next;
  }
  if (count_out) *count_out = next;
  return label;
}

inline bool is_connected(const SpatialGraph& g) {
  if (g.node_count() == 0) return true;
  int count = 0;
  component_labels(g, &count);
  return count == 1;
}

// Subgraph induced by `keep` (sorted, unique node ids). Node ids are
// re-compacted to 0..keep.size()-1 preserving order.
inline SpatialGraph induced_subgraph(const SpatialGraph& g, const std::vector<int>& keep) {
  std::vector<int> remap(g.node_count(), -1);
  SpatialGraph out;
  out.projection_center = g.projection_center;
  out.nodes.reserve(keep.size());
  for (int id : keep) {
    remap[id] = static_cast<int>(out.nodes.size());
    out.nodes.push_back(g.nodes[id]);
  }
  for (const GraphEdge& e : g.edges) {
    const int u = remap[e.u];
    const int v = remap[e.v];
    if (u < 0 || v < 0) continue;
    GraphEdge ne = e;
    ne.u = std::min(u, v);
    ne.v = std::max(u, v);
    out.edges.push_back(ne);
  }
  return out;
}

// Subgraph induced by the largest connected component; ties resolve to the
// component containing the smallest node id. An empty graph maps to itself.
inline SpatialGraph largest_component(const SpatialGraph& g) {
  if (g.node_count() == 0) return g;
  int count = 0;
  const std::vector<int> label = component_labels(g, &count);
  std::vector<int> size(count, 0);
  for (int l : label) ++size[l];
  int best = 0;
  for (int l = 1; l < count; ++l)
    if (size[l] > size[best]) best = l;  // strict: first maximal label wins the tie
  std::vector<int> keep;
  keep.reserve(size[best]);
  for (int i = 0; i < g.node_count(); ++i)
    if (label[i] == best) keep.push_back(i);
  return induced_subgraph(g, keep);
}

}  // namespace gridgen
