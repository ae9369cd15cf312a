#pragma once

// Brute-force reference implementations used only by the tests. They stay
// deliberately independent of the library code paths they check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "gridgen/geo.hpp"
#include "gridgen/graph.hpp"
#include "gridgen/random.hpp"

namespace oracles {

struct DSU {
  std::vector<int> p;
  explicit DSU(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[x] != x) {
      p[x] = p[p[x]];
      x = p[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[a] = b;
    return true;
  }
};

// Kruskal over all point pairs.
inline double kruskal_mst_weight(const std::vector<gridgen::PlanarPoint>& pts) {
  const int n = static_cast<int>(pts.size());
  struct E {
    double w;
    int u, v;
  };
  std::vector<E> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      edges.push_back({gridgen::distance(pts[i], pts[j]), i, j});
  std::sort(edges.begin(), edges.end(), [](const E& a, const E& b) {
    if (a.w != b.w) return a.w < b.w;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });
  DSU dsu(n);
  double w = 0.0;
  int used = 0;
  for (const E& e : edges) {
    if (dsu.unite(e.u, e.v)) {
      w += e.w;
      if (++used == n - 1) break;
    }
  }
  return w;
}

struct PrimResult {
  std::vector<int> order;                  // extraction order, starts at `start`
  std::vector<std::pair<int, int>> edges;  // MST edges (parent, child)
  double weight = 0.0;
};

// Dense O(n^2) Prim; ties resolve to the smallest node index.
inline PrimResult prim_mst(const std::vector<gridgen::PlanarPoint>& pts, int start) {
  const int n = static_cast<int>(pts.size());
  PrimResult res;
  std::vector<char> in_tree(n, 0);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  best[start] = 0.0;
  for (int round = 0; round < n; ++round) {
    int u = -1;
    for (int i = 0; i < n; ++i)
      if (!in_tree[i] && (u == -1 || best[i] < best[u])) u = i;
    in_tree[u] = 1;
    res.order.push_back(u);
    if (parent[u] != -1) {
      res.edges.emplace_back(parent[u], u);
      res.weight += gridgen::distance(pts[parent[u]], pts[u]);
    }
    for (int i = 0; i < n; ++i) {
      if (in_tree[i]) continue;
      const double d = gridgen::distance(pts[u], pts[i]);
      if (d < best[i]) {
        best[i] = d;
        parent[i] = u;
      }
    }
  }
  return res;
}

inline bool is_spanning_tree(int n, const std::vector<std::pair<int, int>>& edges) {
  if (static_cast<int>(edges.size()) != n - 1) return false;
  DSU dsu(n);
  for (const auto& [u, v] : edges)
    if (u == v || !dsu.unite(u, v)) return false;  // self-loop or cycle
  return true;
}

// All-pairs average path length (hops) via Floyd-Warshall; -1 if disconnected.
inline double floyd_warshall_apl(const gridgen::SpatialGraph& g) {
  const int n = g.node_count();
  constexpr int kInf = 1 << 28;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, kInf));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& e : g.edges) d[e.u][e.v] = d[e.v][e.u] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  long long sum = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (d[i][j] >= kInf) return -1.0;
      sum += d[i][j];
    }
  return static_cast<double>(sum) / (static_cast<double>(n) * (n - 1));
}

// Clustering coefficient by explicit triple enumeration on an adjacency matrix.
inline double clustering_by_triples(const gridgen::SpatialGraph& g) {
  const int n = g.node_count();
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (const auto& e : g.edges) adj[e.u][e.v] = adj[e.v][e.u] = 1;
  std::vector<int> deg(n, 0), tri(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) deg[i] += adj[i][j];
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        if (adj[a][b] && adj[b][c] && adj[a][c]) {
          ++tri[a];
          ++tri[b];
          ++tri[c];
        }
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    if (deg[i] >= 2) sum += tri[i] / (0.5 * deg[i] * (deg[i] - 1));
  return sum / n;
}

// Mean distance to the k nearest neighbours, by full sort.
inline double brute_rho(const std::vector<gridgen::PlanarPoint>& pts, int i, int k) {
  std::vector<double> d;
  for (std::size_t j = 0; j < pts.size(); ++j)
    if (static_cast<int>(j) != i) d.push_back(gridgen::distance(pts[i], pts[j]));
  std::sort(d.begin(), d.end());
  double s = 0.0;
  for (int t = 0; t < k; ++t) s += d[t];
  return s / k;
}

inline double simpson(double a, double b, int steps, const auto& f) {
  if (steps % 2) ++steps;
  const double h = (b - a) / steps;
  double s = f(a) + f(b);
  for (int i = 1; i < steps; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Random connected graph: star-free random tree plus extra distinct edges.
inline gridgen::SpatialGraph random_connected_graph(int n, int extra, std::uint64_t seed) {
  gridgen::Rng rng(seed);
  gridgen::SpatialGraph g;
  g.nodes.resize(n);
  for (int i = 0; i < n; ++i)
    g.nodes[i].pos = {rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)};
  std::vector<std::pair<int, int>> edges;
  for (int v = 1; v < n; ++v) edges.emplace_back(static_cast<int>(rng.below(v)), v);
  std::vector<char> have(static_cast<std::size_t>(n) * n, 0);
  for (auto& [u, v] : edges) have[static_cast<std::size_t>(u) * n + v] = have[static_cast<std::size_t>(v) * n + u] = 1;
  int tries = 0;
  while (extra > 0 && tries < 100 * extra) {
    ++tries;
    const int u = static_cast<int>(rng.below(n));
    const int v = static_cast<int>(rng.below(n));
    if (u == v || have[static_cast<std::size_t>(u) * n + v]) continue;
    have[static_cast<std::size_t>(u) * n + v] = have[static_cast<std::size_t>(v) * n + u] = 1;
    edges.emplace_back(u, v);
    --extra;
  }
  for (const auto& [u, v] : edges)
    g.edges.push_back({std::min(u, v), std::max(u, v), std::nullopt, 1});
  return g;
}

inline std::vector<gridgen::PlanarPoint> random_points(int n, double extent, std::uint64_t seed) {
  gridgen::Rng rng(seed);
  std::vector<gridgen::PlanarPoint> pts(n);
  for (auto& p : pts) p = {rng.uniform(0.0, extent), rng.uniform(0.0, extent)};
  return pts;
}

// Points drawn from a ring of isotropic Gaussian blobs.
inline std::vector<gridgen::PlanarPoint> clustered_points(int n, int blobs, double spread,
                                                          double sigma, std::uint64_t seed) {
  gridgen::Rng rng(seed);
  std::vector<gridgen::PlanarPoint> centers(blobs);
  for (int b = 0; b < blobs; ++b) {
    const double ang = 2.0 * gridgen::kPi * b / blobs;
    centers[b] = {spread * std::cos(ang), spread * std::sin(ang)};
  }
  std::vector<gridgen::PlanarPoint> pts(n);
  for (auto& p : pts) {
    const auto& c = centers[rng.below(blobs)];
    p = {c.x + sigma * rng.normal(), c.y + sigma * rng.normal()};
  }
  return pts;
}

}  // namespace oracles
