#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridgen/errors.hpp"
#include "gridgen/geo.hpp"
#include "gridgen/graph.hpp"
#include "gridgen/grid_index.hpp"

namespace gridgen {

// One transmission line: polyline geometry whose first and last points are
// the substation endpoints.
struct LineRecord {
  std::string id;
  std::vector<GeoPoint> geometry;  // length >= 2
  std::string voltage_class;
};

// Outer ring plus optional holes; rings are closed (first vertex repeated
// last) with at least 3 distinct vertices.
struct RegionPolygon {
  std::vector<std::vector<GeoPoint>> rings;
};

inline void validate(const RegionPolygon& poly) {
  if (poly.rings.empty()) throw input_error("region polygon has no rings");
  for (const auto& ring : poly.rings) {
    if (ring.size() < 4) throw input_error("polygon ring must have at least 3 vertices");
    if (ring.front().lon != ring.back().lon || ring.front().lat != ring.back().lat)
      throw input_error("polygon ring is not closed");
    int distinct = 0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
      bool dup = false;
      for (std::size_t j = 0; j < i; ++j)
        if (ring[j].lon == ring[i].lon && ring[j].lat == ring[i].lat) dup = true;
      if (!dup) ++distinct;
    }
    if (distinct < 3) throw input_error("polygon ring must have at least 3 distinct vertices");
    for (const GeoPoint& p : ring) validate(p);
  }
}

namespace detail {

inline bool on_segment(const GeoPoint& a, const GeoPoint& b, const GeoPoint& p) {
  const double cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
  const double len2 = (b.lon - a.lon) * (b.lon - a.lon) + (b.lat - a.lat) * (b.lat - a.lat);
  if (std::abs(cross) > 1e-12 * std::max(1.0, len2)) return false;
  const double dot = (p.lon - a.lon) * (b.lon - a.lon) + (p.lat - a.lat) * (b.lat - a.lat);
  return dot >= 0.0 && dot <= len2;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace detail

// Even-odd point-in-polygon test on geographic coordinates; points on a ring
// boundary count as inside. The polygon is assumed valid.
inline bool point_in_polygon(const RegionPolygon& poly, const GeoPoint& p) {
  for (const auto& ring : poly.rings)
    for (std::size_t i = 0; i + 1 < ring.size(); ++i)
      if (detail::on_segment(ring[i], ring[i + 1], p)) return true;
  int crossings = 0;
  for (const auto& ring : poly.rings) {
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
      const GeoPoint& a = ring[i];
      const GeoPoint& b = ring[i + 1];
      if ((a.lat > p.lat) == (b.lat > p.lat)) continue;
      const double x_int = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (x_int > p.lon) ++crossings;
    }
  }
  return (crossings & 1) != 0;
}

// Mean longitude/latitude of all line endpoints; the default projection center.
inline GeoPoint endpoint_centroid(const std::vector<LineRecord>& lines) {
  if (lines.empty()) throw input_error("no input lines");
  double lon = 0.0, lat = 0.0;
  for (const LineRecord& l : lines) {
    lon += l.geometry.front().lon + l.geometry.back().lon;
    lat += l.geometry.front().lat + l.geometry.back().lat;
  }
  const double n = 2.0 * lines.size();
  return {lon / n, lat / n};
}

// Builds a SpatialGraph from line records. Endpoints within
// snap_tolerance_km (great-circle) collapse onto one node via union-find;
// candidate pairs come from a coarse grid over the projected endpoints.
// A line whose endpoints snap together is dropped; repeated node pairs
// accumulate multiplicity and keep the minimum polyline length.
inline SpatialGraph build_graph(const std::vector<LineRecord>& lines, double snap_tolerance_km,
                                const GeoPoint& center) {
  if (lines.empty()) throw input_error("no input lines");
  if (!(snap_tolerance_km > 0.0)) throw input_error("snap tolerance must be positive");
  validate(center);
  for (const LineRecord& l : lines) {
    if (l.geometry.size() < 2) throw input_error("line '" + l.id + "' has fewer than 2 points");
    for (const GeoPoint& p : l.geometry) validate(p);
  }

  const int n_end = static_cast<int>(lines.size()) * 2;
  std::vector<GeoPoint> end_geo(n_end);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    end_geo[2 * i] = lines[i].geometry.front();
    end_geo[2 * i + 1] = lines[i].geometry.back();
  }
  const std::vector<PlanarPoint> end_planar = project(end_geo, center);

  // Cell size 4x the tolerance absorbs the projection's pairwise distortion;
  // the exact great-circle check decides membership.
  const UniformGrid2d grid(end_planar, 4.0 * snap_tolerance_km);
  detail::UnionFind uf(n_end);
  for (int i = 0; i < n_end; ++i) {
    for (int j : grid.within_radius(i, 4.0 * snap_tolerance_km)) {
      if (j <= i) continue;
      if (great_circle_km(end_geo[i], end_geo[j]) <= snap_tolerance_km) uf.unite(i, j);
    }
  }

  // group id by first appearance -> contiguous node ids
  std::unordered_map<int, int> group_to_node;
  std::vector<int> node_of_endpoint(n_end);
  std::vector<double> sum_lon, sum_lat;
  std::vector<int> group_size;
  for (int i = 0; i < n_end; ++i) {
    const int root = uf.find(i);
    auto it = group_to_node.find(root);
    int node;
    if (it == group_to_node.end()) {
      node = static_cast<int>(sum_lon.size());
      group_to_node.emplace(root, node);
      sum_lon.push_back(0.0);
      sum_lat.push_back(0.0);
      group_size.push_back(0);
    } else {
      node = it->second;
    }
    node_of_endpoint[i] = node;
    sum_lon[node] += end_geo[i].lon;
    sum_lat[node] += end_geo[i].lat;
    ++group_size[node];
  }

  SpatialGraph g;
  g.projection_center = center;
  g.nodes.resize(sum_lon.size());
  for (std::size_t v = 0; v < sum_lon.size(); ++v) {
    const GeoPoint geo{sum_lon[v] / group_size[v], sum_lat[v] / group_size[v]};
    g.nodes[v].geo = geo;
    g.nodes[v].pos = project_point(geo, center);
  }

  std::unordered_map<std::uint64_t, std::size_t> edge_index;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int u = node_of_endpoint[2 * i];
    const int v = node_of_endpoint[2 * i + 1];
    if (u == v) continue;  // endpoints snapped together
    const double len = polyline_length_km(lines[i].geometry);
    const std::uint64_t key = edge_key(u, v);
    const auto it = edge_index.find(key);
    if (it == edge_index.end()) {
      edge_index.emplace(key, g.edges.size());
      g.edges.push_back({std::min(u, v), std::max(u, v), len, 1});
    } else {
      GraphEdge& e = g.edges[it->second];
      ++e.multiplicity;
      e.actual_km = std::min(*e.actual_km, len);
    }
  }
  return g;
}

// Keeps exactly the nodes whose geographic position lies inside the polygon
// (boundary included) and the edges with both endpoints kept; node ids are
// re-compacted.
inline SpatialGraph clip_region(const SpatialGraph& g, const RegionPolygon& poly) {
  validate(poly);
  std::vector<int> keep;
  for (int i = 0; i < g.node_count(); ++i) {
    if (!g.nodes[i].geo)
      throw input_error("clip_region: graph node lacks geographic coordinates");
    if (point_in_polygon(poly, *g.nodes[i].geo)) keep.push_back(i);
  }
  return induced_subgraph(g, keep);
}

}  // namespace gridgen
