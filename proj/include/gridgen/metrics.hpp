#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "gridgen/errors.hpp"
#include "gridgen/graph.hpp"
#include "gridgen/random.hpp"

namespace gridgen {

struct DegreeHistogram {
  std::map<int, int> counts;  // degree -> node count
};

inline DegreeHistogram degree_histogram(const SpatialGraph& g) {
  DegreeHistogram h;
  for (int d : degrees(g)) ++h.counts[d];
  return h;
}

// exact when sample_sources is absent, otherwise BFS from that many sources
struct AplMode {
  std::optional<int> sample_sources;
  std::uint64_t seed = 0;
};

struct AplResult {
  double value = 0.0;
  std::optional<double> standard_error;  // sampled mode only
};

namespace detail {

// Hop distances from src; returns the number of reached nodes.
inline int bfs_distances(const std::vector<std::vector<int>>& adj, int src,
                         std::vector<int>& dist, std::vector<int>& queue) {
  std::fill(dist.begin(), dist.end(), -1);
  queue.clear();
  queue.push_back(src);
  dist[src] = 0;
  std::size_t head = 0;
  while (head < queue.size()) {
    const int u = queue[head++];
    for (int v : adj[u]) {
      if (dist[v] == -1) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return static_cast<int>(queue.size());
}

}  // namespace detail

// Mean hop count over ordered node pairs. Exact mode runs BFS from every
// node; sampled mode averages the per-source means of `sample_sources`
// uniformly drawn sources (an unbiased estimate) and reports its standard
// error. Either mode requires a connected graph.
inline AplResult avg_path_length(const SpatialGraph& g, const AplMode& mode = {}) {
  const int n = g.node_count();
  if (n == 0) throw input_error("avg_path_length: empty graph");
  if (n == 1) return {0.0, std::nullopt};
  const auto adj = adjacency(g);
  std::vector<int> dist(n), queue;
  queue.reserve(n);

  std::vector<int> sources;
  const bool sampled = mode.sample_sources.has_value() && *mode.sample_sources < n;
  if (sampled) {
    const int k = *mode.sample_sources;
    if (k < 1) throw input_error("avg_path_length: sample source count must be >= 1");
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = i;
    Rng rng(mode.seed);
    for (int i = 0; i < k; ++i)
      std::swap(ids[i], ids[i + rng.below(static_cast<std::uint64_t>(n - i))]);
    sources.assign(ids.begin(), ids.begin() + k);
  } else {
    sources.resize(n);
    for (int i = 0; i < n; ++i) sources[i] = i;
  }

  double mean_sum = 0.0, mean_sq_sum = 0.0;
  for (int s : sources) {
    if (detail::bfs_distances(adj, s, dist, queue) < n)
      throw graph_state_error("graph disconnected");
    long long total = 0;
    for (int d : dist) total += d;
    const double source_mean = static_cast<double>(total) / (n - 1);
    mean_sum += source_mean;
    mean_sq_sum += source_mean * source_mean;
  }
  const double k = static_cast<double>(sources.size());
  AplResult res;
  res.value = mean_sum / k;
  if (sampled) {
    const double var = k > 1.0 ? std::max(0.0, (mean_sq_sum - k * res.value * res.value) / (k - 1.0)) : 0.0;
    res.standard_error = std::sqrt(var / k);
  }
  return res;
}

struct ClusteringResult {
  double average = 0.0;
  std::vector<double> per_node;
};

// C_i = realized fraction of possible edges among the neighbours of i; nodes
// of degree < 2 contribute C_i = 0 and are included in the average.
inline ClusteringResult clustering_coefficient(const SpatialGraph& g) {
  const int n = g.node_count();
  if (n == 0) throw input_error("clustering_coefficient: empty graph");
  auto adj = adjacency(g);
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());
  ClusteringResult res;
  res.per_node.resize(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto& nb = adj[i];
    const int d = static_cast<int>(nb.size());
    if (d < 2) continue;
    long long present = 0;
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b)
        if (std::binary_search(adj[nb[a]].begin(), adj[nb[a]].end(), nb[b])) ++present;
    res.per_node[i] = static_cast<double>(present) / (0.5 * d * (d - 1));
    res.average += res.per_node[i];
  }
  res.average /= n;
  return res;
}

// OLS slope of ln(frequency) vs ln(degree) over degrees strictly above
// min_degree with nonzero counts.
inline double tail_slope(const DegreeHistogram& h, int min_degree) {
  if (min_degree < 0) throw input_error("tail_slope: min_degree must be >= 0");
  long long n = 0;
  for (const auto& [d, cnt] : h.counts) n += cnt;
  std::vector<double> xs, ys;
  for (const auto& [d, cnt] : h.counts) {
    if (d <= min_degree || cnt <= 0) continue;
    xs.push_back(std::log(static_cast<double>(d)));
    ys.push_back(std::log(static_cast<double>(cnt) / static_cast<double>(n)));
  }
  if (xs.size() < 2) throw input_error("tail_slope: fewer than 2 usable degrees");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

// Kolmogorov-Smirnov statistic: max absolute difference of the two empirical
// CDFs. Symmetric, in [0, 1].
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw input_error("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (i < a.size() && (j >= b.size() || a[i] <= b[j]))
      x = a[i];
    else
      x = b[j];
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

inline double ks_statistic(const std::vector<int>& a, const std::vector<int>& b) {
  return ks_statistic(std::vector<double>(a.begin(), a.end()),
                      std::vector<double>(b.begin(), b.end()));
}

namespace detail {

// k-th smallest |x - a[i]| over a sorted array. One exact match of x is
// skipped when skip_one_equal is set (and enough elements remain): a
// zero-distance entry is taken to be the query observation itself, which
// makes comparing a sample against itself report ~0 divergence.
inline double kth_neighbor_distance(const std::vector<double>& a, double x, int k,
                                    bool skip_one_equal) {
  const int n = static_cast<int>(a.size());
  const auto it = std::lower_bound(a.begin(), a.end(), x);
  const int pos = static_cast<int>(it - a.begin());
  int lo, hi;
  if (skip_one_equal && pos < n && a[pos] == x && n - 1 >= k) {
    lo = pos - 1;
    hi = pos + 1;
  } else {
    lo = pos - 1;
    hi = pos;
  }
  double d = 0.0;
  for (int t = 0; t < k; ++t) {
    const double dl = lo >= 0 ? x - a[lo] : std::numeric_limits<double>::infinity();
    const double dr = hi < n ? a[hi] - x : std::numeric_limits<double>::infinity();
    if (dl <= dr) {
      d = dl;
      --lo;
    } else {
      d = dr;
      ++hi;
    }
  }
  return d;
}

}  // namespace detail

// k-nearest-neighbour estimate of D_KL(p || q) for scalar samples:
//   (1/n) sum_i [ln nu_k(i) - ln r_k(i)] + ln(m / (n - 1)),
// r_k within sample_p (self excluded), nu_k within sample_q. Neighbour
// distances are floored at 1e-9. Not symmetric.
inline double kl_divergence(const std::vector<double>& sample_p,
                            const std::vector<double>& sample_q, int k) {
  const int n = static_cast<int>(sample_p.size());
  const int m = static_cast<int>(sample_q.size());
  if (k < 1) throw input_error("kl_divergence: k must be >= 1");
  if (n <= k) throw input_error("kl_divergence: p sample must have more than k points");
  if (m < k) throw input_error("kl_divergence: q sample must have at least k points");
  std::vector<double> sp = sample_p;
  std::vector<double> sq = sample_q;
  std::sort(sp.begin(), sp.end());
  std::sort(sq.begin(), sq.end());
  constexpr double kFloor = 1e-9;
  double acc = 0.0;
  for (double x : sample_p) {
    const double r = std::max(detail::kth_neighbor_distance(sp, x, k, true), kFloor);
    const double nu = std::max(detail::kth_neighbor_distance(sq, x, k, true), kFloor);
    acc += std::log(nu) - std::log(r);
  }
  return acc / n + std::log(static_cast<double>(m) / (n - 1));
}

enum class LengthKind { straight, actual };

// Per-edge lengths: Euclidean endpoint distance, or the stored polyline
// ("actual") lengths. Multiplicity does not repeat an edge.
inline std::vector<double> edge_lengths(const SpatialGraph& g, LengthKind kind) {
  std::vector<double> out;
  out.reserve(g.edges.size());
  for (const GraphEdge& e : g.edges) {
    if (kind == LengthKind::straight) {
      out.push_back(distance(g.nodes[e.u].pos, g.nodes[e.v].pos));
    } else {
      if (!e.actual_km) throw input_error("edge_lengths: actual length missing on an edge");
      out.push_back(*e.actual_km);
    }
  }
  return out;
}

struct LengthStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double max = 0.0;
};

inline LengthStats length_stats(const std::vector<double>& v) {
  LengthStats s;
  if (v.empty()) return s;
  for (double x : v) {
    s.mean += x;
    s.max = std::max(s.max, x);
  }
  s.mean /= v.size();
  if (v.size() > 1) {
    double acc = 0.0;
    for (double x : v) acc += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(acc / (v.size() - 1));
  }
  return s;
}

struct ReportOptions {
  int min_degree = 2;  // tail cutoff for zeta
  int k_kl = 10;
  AplMode apl;
};

struct MetricsReport {
  int n = 0;
  int m = 0;
  int component_count = 0;
  double avg_path_length = 0.0;
  std::optional<double> apl_standard_error;
  double clustering = 0.0;
  std::optional<double> zeta;  // absent when the tail has < 2 usable degrees
  int zeta_min_degree = 2;
  DegreeHistogram degrees;
  LengthStats straight;
  std::optional<LengthStats> actual;
  std::optional<double> d_ks;  // vs reference degree distribution
  std::optional<double> d_kl;  // reference straight lengths as p, this graph as q
};

// Composes every structural metric; with a reference graph it also fills the
// degree KS statistic and the line-length KL divergence (reference as p).
inline MetricsReport structural_report(const SpatialGraph& g, const SpatialGraph* reference,
                                       const ReportOptions& opts = {}) {
  const int n = g.node_count();
  if (n == 0) throw input_error("structural_report: empty graph");
  MetricsReport r;
  r.n = n;
  r.m = g.edge_count();
  component_labels(g, &r.component_count);
  const AplResult apl = avg_path_length(g, opts.apl);
  r.avg_path_length = apl.value;
  r.apl_standard_error = apl.standard_error;
  r.clustering = clustering_coefficient(g).average;
  r.degrees = degree_histogram(g);
  r.zeta_min_degree = opts.min_degree;
  int usable = 0;
  for (const auto& [d, cnt] : r.degrees.counts)
    if (d > opts.min_degree && cnt > 0) ++usable;
  if (usable >= 2) r.zeta = tail_slope(r.degrees, opts.min_degree);

  const std::vector<double> straight = edge_lengths(g, LengthKind::straight);
  r.straight = length_stats(straight);
  bool have_actual = !g.edges.empty();
  for (const GraphEdge& e : g.edges)
    if (!e.actual_km) {
      have_actual = false;
      break;
    }
  if (have_actual) r.actual = length_stats(edge_lengths(g, LengthKind::actual));

  if (reference) {
    std::vector<int> deg_ref = degrees(*reference);
    std::vector<int> deg_g = degrees(g);
    r.d_ks = ks_statistic(deg_ref, deg_g);
    r.d_kl = kl_divergence(edge_lengths(*reference, LengthKind::straight), straight, opts.k_kl);
  }
  return r;
}

}  // namespace gridgen
