#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_set>
#include <vector>

#include "gridgen/errors.hpp"
#include "gridgen/geo.hpp"
#include "gridgen/graph.hpp"
#include "gridgen/grid_index.hpp"
#include "gridgen/mixture.hpp"
#include "gridgen/random.hpp"

namespace gridgen {

// Source-sampling rule for reinforcement: large networks restrict sources to
// nodes of degree < 3; small networks weight all nodes by degree^-eta.
enum class NetworkMode { large, small };

inline NetworkMode default_mode(int n_target) {
  return n_target >= 5000 ? NetworkMode::large : NetworkMode::small;
}

struct GenParams {
  double kappa = 2.5;  // ordering concentration around the centroid
  double alpha = 1.0;  // density bias of the reinforcement source
  double beta = 3.2;   // distance penalty of the reinforcement target
  double gamma = 2.5;  // degree attraction of the reinforcement target
  double eta = 2.0;    // degree penalty of the source (small mode only)
  int nn = 10;         // neighbourhood size N for rho
  NetworkMode mode = NetworkMode::large;
  int n_target = 0;
  int m_target = 0;
  std::uint64_t seed = 0;
};

inline void validate(const GenParams& p) {
  if (!(p.kappa >= 0.0)) throw input_error("kappa must be >= 0");
  if (!(p.alpha > 0.0)) throw input_error("alpha must be > 0");
  if (!(p.beta > 0.0)) throw input_error("beta must be > 0");
  if (!(p.gamma >= 0.0)) throw input_error("gamma must be >= 0");
  if (!(p.eta >= 0.0)) throw input_error("eta must be >= 0");
  if (p.nn < 1) throw input_error("nn must be >= 1");
  if (p.n_target < 2) throw input_error("n_target must be >= 2");
  if (p.nn >= p.n_target) throw input_error("nn must be < n_target");
  if (p.m_target < p.n_target - 1) throw input_error("m_target must be >= n_target - 1");
  const long long max_m = static_cast<long long>(p.n_target) * (p.n_target - 1) / 2;
  if (static_cast<long long>(p.m_target) > max_m)
    throw input_error("m_target exceeds the simple-graph maximum n(n-1)/2");
}

// Round order of the nodes: order.order[i] is the node placed in round i.
struct Permutation {
  std::vector<int> order;
};

inline void validate(const Permutation& p, int n) {
  if (static_cast<int>(p.order.size()) != n) throw input_error("permutation has wrong length");
  std::vector<char> seen(n, 0);
  for (int v : p.order) {
    if (v < 0 || v >= n || seen[v]) throw input_error("permutation is not a bijection");
    seen[v] = 1;
  }
}

// Average distance of each node from its N nearest neighbours.
struct RhoTable {
  std::vector<double> rho;  // km
  int nn = 0;
};

namespace detail {

inline double bbox_diagonal(const std::vector<PlanarPoint>& pts) {
  if (pts.empty()) return 0.0;
  double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
  for (const PlanarPoint& p : pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double dx = max_x - min_x;
  const double dy = max_y - min_y;
  return std::sqrt(dx * dx + dy * dy);
}

// Distance floor: keeps inverse-power weights finite when a node coincides
// with the centroid or with another node.
inline double distance_floor(const std::vector<PlanarPoint>& pts) {
  const double d = 1e-9 * bbox_diagonal(pts);
  return d > 0.0 ? d : 1e-12;
}

// Sequential weighted sampling without replacement from static log-weights.
// Weights are kept in linear space relative to the global maximum; when the
// remaining mass underflows (very large exponents), the survivors are
// re-normalized so relative probabilities stay exact.
class WithoutReplacementSampler {
 public:
  explicit WithoutReplacementSampler(std::vector<double> log_weights)
      : logw_(std::move(log_weights)), w_(logw_.size()), remaining_(logw_.size()) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double lw : logw_) mx = std::max(mx, lw);
    for (std::size_t i = 0; i < logw_.size(); ++i) {
      w_[i] = std::exp(logw_[i] - mx);
      remaining_[i] = static_cast<int>(i);
    }
  }

  bool empty() const { return remaining_.empty(); }

  int draw(Rng& rng) {
    double total = 0.0;
    for (int idx : remaining_) total += w_[idx];
    if (!(total > 1e-250)) {
      double mx = -std::numeric_limits<double>::infinity();
      for (int idx : remaining_) mx = std::max(mx, logw_[idx]);
      total = 0.0;
      for (int idx : remaining_) {
        w_[idx] = std::exp(logw_[idx] - mx);
        total += w_[idx];
      }
    }
    const double u = rng.uniform(0.0, total);
    double acc = 0.0;
    std::size_t pick = remaining_.size() - 1;
    for (std::size_t k = 0; k < remaining_.size(); ++k) {
      acc += w_[remaining_[k]];
      if (acc > u) {
        pick = k;
        break;
      }
    }
    const int chosen = remaining_[pick];
    remaining_[pick] = remaining_.back();
    remaining_.pop_back();
    return chosen;
  }

 private:
  std::vector<double> logw_;
  std::vector<double> w_;
  std::vector<int> remaining_;
};

}  // namespace detail

// Orders the nodes by sequential sampling without replacement, node j drawn
// with probability proportional to ||p_j - centroid||^-kappa over the nodes
// not yet placed. kappa = 0 gives a uniform random permutation.
inline Permutation twst_order(const std::vector<PlanarPoint>& points, double kappa,
                              std::uint64_t seed) {
  const int n = static_cast<int>(points.size());
  if (n < 1) throw input_error("twst_order: empty point list");
  if (!(kappa >= 0.0)) throw input_error("twst_order: kappa must be >= 0");

  double cx = 0.0, cy = 0.0;
  for (const PlanarPoint& p : points) {
    cx += p.x;
    cy += p.y;
  }
  const PlanarPoint centroid{cx / n, cy / n};
  const double diag = detail::bbox_diagonal(points);
  const double eps = 1e-9 * diag;

  std::vector<double> logw(n, 0.0);
  if (kappa > 0.0 && diag > 0.0) {
    for (int i = 0; i < n; ++i)
      logw[i] = -kappa * std::log(std::max(distance(points[i], centroid), eps));
  }

  detail::WithoutReplacementSampler sampler(std::move(logw));
  Rng rng(seed);
  Permutation perm;
  perm.order.reserve(n);
  while (!sampler.empty()) perm.order.push_back(sampler.draw(rng));
  return perm;
}

struct TreeResult {
  std::vector<std::pair<int, int>> edges;  // (earlier node, later node) per round
  double weight_km = 0.0;                  // sum of edge lengths W_T
};

// Connects each node, in round order, to the nearest node placed in an
// earlier round; distance ties resolve to the smallest round index. The
// result is always a spanning tree with n-1 edges.
inline TreeResult twst_connect(const std::vector<PlanarPoint>& points, const Permutation& order) {
  const int n = static_cast<int>(points.size());
  validate(order, n);
  TreeResult tree;
  tree.edges.reserve(n > 0 ? n - 1 : 0);
  for (int i = 1; i < n; ++i) {
    const PlanarPoint& p = points[order.order[i]];
    int best_round = 0;
    double best_d2 = squared_distance(p, points[order.order[0]]);
    for (int j = 1; j < i; ++j) {
      const double d2 = squared_distance(p, points[order.order[j]]);
      if (d2 < best_d2) {
        best_d2 = d2;
        best_round = j;
      }
    }
    tree.edges.emplace_back(order.order[best_round], order.order[i]);
    tree.weight_km += std::sqrt(best_d2);
  }
  return tree;
}

// Exact rho_i = mean distance from node i to its nn nearest neighbours.
inline RhoTable compute_rho(const std::vector<PlanarPoint>& points, int nn) {
  const int n = static_cast<int>(points.size());
  if (nn < 1) throw input_error("compute_rho: N must be >= 1");
  if (nn >= n) throw input_error("compute_rho: N must be < node count");
  RhoTable table;
  table.nn = nn;
  table.rho.resize(n);
  const UniformGrid2d grid(points, UniformGrid2d::density_cell_size(points));
  for (int i = 0; i < n; ++i) {
    const std::vector<double> d = grid.knn_distances(i, nn);
    double sum = 0.0;
    for (double v : d) sum += v;
    table.rho[i] = sum / nn;
  }
  return table;
}

// Adds m_target - n_target + 1 reinforcement edges to a spanning tree.
// Each step samples a source (density-biased low-degree node) and a target
// (distance-penalized, degree-attracted); an existing pair is redrawn up to
// 100 times before the source itself is resampled. `added` (optional)
// receives the (source, target) pairs in insertion order.
inline SpatialGraph reinforce(const SpatialGraph& tree, const RhoTable& rho,
                              const GenParams& params, std::uint64_t seed,
                              std::vector<std::pair<int, int>>* added = nullptr) {
  validate(params);
  const int n = tree.node_count();
  if (n != params.n_target) throw input_error("reinforce: tree size differs from n_target");
  if (tree.edge_count() != n - 1 || !is_connected(tree))
    throw input_error("reinforce: input graph is not a spanning tree");
  if (static_cast<int>(rho.rho.size()) != n) throw input_error("reinforce: rho table size mismatch");

  SpatialGraph g = tree;
  std::vector<int> deg = degrees(g);
  std::unordered_set<std::uint64_t> present;
  present.reserve(params.m_target * 2);
  for (const GraphEdge& e : g.edges) present.insert(edge_key(e.u, e.v));

  std::vector<PlanarPoint> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = g.nodes[i].pos;
  const double eps = detail::distance_floor(pts);

  // rho^-alpha is static; degrees evolve per added edge
  std::vector<double> rho_pow(n);
  for (int i = 0; i < n; ++i)
    rho_pow[i] = std::pow(std::max(rho.rho[i], eps), -params.alpha);

  Rng rng(seed);
  std::vector<double> source_w(n);
  std::vector<int> candidates;
  std::vector<double> target_cum(n);
  std::vector<int> target_id(n);

  const int to_add = params.m_target - (n - 1);
  for (int step = 0; step < to_add; ++step) {
    bool placed = false;
    while (!placed) {
      // source
      int src = -1;
      bool use_small_rule = params.mode == NetworkMode::small;
      if (!use_small_rule) {
        candidates.clear();
        for (int i = 0; i < n; ++i)
          if (deg[i] < 3) candidates.push_back(i);
        if (candidates.empty()) {
          use_small_rule = true;  // saturated: fall back to the small-network rule
        } else {
          source_w.resize(candidates.size());
          double total = 0.0;
          for (std::size_t k = 0; k < candidates.size(); ++k) {
            source_w[k] = rho_pow[candidates[k]];
            total += source_w[k];
          }
          src = candidates[pick_weighted(source_w, total, rng)];
        }
      }
      if (use_small_rule) {
        source_w.resize(n);
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
          source_w[i] = std::pow(static_cast<double>(deg[i]), -params.eta) * rho_pow[i];
          total += source_w[i];
        }
        src = pick_weighted(source_w, total, rng);
      }

      // target distribution for this source, normalized in log space so large
      // beta exponents cannot overflow
      int m_count = 0;
      double lmax = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j) {
        if (j == src) continue;
        const double d = std::max(distance(pts[src], pts[j]), eps);
        const double lw = -params.beta * std::log(d) + params.gamma * std::log(static_cast<double>(deg[j]));
        target_cum[m_count] = lw;
        target_id[m_count] = j;
        lmax = std::max(lmax, lw);
        ++m_count;
      }
      double cum = 0.0;
      for (int k = 0; k < m_count; ++k) {
        cum += std::exp(target_cum[k] - lmax);
        target_cum[k] = cum;
      }

      for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
        const double u = rng.uniform(0.0, cum);
        const int k = static_cast<int>(
            std::upper_bound(target_cum.begin(), target_cum.begin() + m_count, u) -
            target_cum.begin());
        const int tgt = target_id[std::min(k, m_count - 1)];
        const std::uint64_t key = edge_key(src, tgt);
        if (present.count(key)) continue;  // duplicate pair: redraw the target
        present.insert(key);
        g.edges.push_back({std::min(src, tgt), std::max(src, tgt), std::nullopt, 1});
        ++deg[src];
        ++deg[tgt];
        if (added) added->emplace_back(src, tgt);
        placed = true;
      }
      // 100 collisions: resample the source
    }
  }
  return g;
}

// Full generation pipeline: sample node positions from the mixture, order and
// connect them into a spanning tree, then reinforce. Stage seeds are derived
// from params.seed (stage 0 = sampling, 1 = ordering, 2 = reinforcement) so
// every stage is independently reproducible.
inline SpatialGraph gnlg(const GmmModel& model, const GenParams& params) {
  validate(params);
  const std::vector<PlanarPoint> pts = sample(model, params.n_target, stage_seed(params.seed, 0));
  const Permutation order = twst_order(pts, params.kappa, stage_seed(params.seed, 1));
  const TreeResult tree = twst_connect(pts, order);
  const RhoTable rho = compute_rho(pts, params.nn);

  SpatialGraph g;
  g.nodes.resize(params.n_target);
  for (int i = 0; i < params.n_target; ++i) g.nodes[i].pos = pts[i];
  g.edges.reserve(params.m_target);
  for (const auto& [u, v] : tree.edges)
    g.edges.push_back({std::min(u, v), std::max(u, v), std::nullopt, 1});

  return reinforce(g, rho, params, stage_seed(params.seed, 2));
}

}  // namespace gridgen
