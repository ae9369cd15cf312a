#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "gridgen/errors.hpp"
#include "gridgen/geo.hpp"

namespace gridgen {

// Uniform hash-grid over 2-D points. Supports exact k-nearest-neighbour
// queries via expanding cell rings and radius scans for snapping. Queries
// enumerate cells in fixed coordinate order, so results are deterministic.
class UniformGrid2d {
 public:
  UniformGrid2d(const std::vector<PlanarPoint>& points, double cell_size)
      : points_(points), cell_(cell_size > 0.0 ? cell_size : 1.0) {
    cells_.reserve(points.size() * 2 + 1);
    for (std::size_t i = 0; i < points.size(); ++i)
      cells_[key_of(points[i])].push_back(static_cast<int>(i));
    max_ring_ = 2 + extent_cells();
  }

  double cell_size() const { return cell_; }

  // Heuristic cell size: roughly one point per cell for uniform data.
  static double density_cell_size(const std::vector<PlanarPoint>& points) {
    if (points.size() < 2) return 1.0;
    double min_x = points[0].x, max_x = points[0].x;
    double min_y = points[0].y, max_y = points[0].y;
    for (const PlanarPoint& p : points) {
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
    const double area = (max_x - min_x) * (max_y - min_y);
    const double h = std::sqrt(area / static_cast<double>(points.size()));
    return h > 0.0 ? h : 1.0;
  }

  // Distances to the k nearest neighbours of points_[query] (the point itself
  // excluded), ascending. k must be < number of points.
  std::vector<double> knn_distances(int query, int k) const {
    if (k < 1 || k >= static_cast<int>(points_.size()))
      throw input_error("knn: k out of range");
    const PlanarPoint q = points_[query];
    const auto [qx, qy] = cell_coords(q);

    // max-heap of the k best squared distances
    std::vector<double> heap;
    heap.reserve(k);
    const auto consider = [&](int idx) {
      if (idx == query) return;
      const double d2 = squared_distance(q, points_[idx]);
      if (static_cast<int>(heap.size()) < k) {
        heap.push_back(d2);
        std::push_heap(heap.begin(), heap.end());
      } else if (d2 < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = d2;
        std::push_heap(heap.begin(), heap.end());
      }
    };

    long long ring = 0;
    while (ring <= max_ring_) {
      visit_ring(qx, qy, ring, consider);
      // all unvisited points are at distance >= ring * cell_
      if (static_cast<int>(heap.size()) == k) {
        const double bound = static_cast<double>(ring) * cell_;
        if (heap.front() <= bound * bound) break;
      }
      ++ring;
    }
    std::sort_heap(heap.begin(), heap.end());
    for (double& d2 : heap) d2 = std::sqrt(d2);
    return heap;
  }

  // Indices of points within `radius` of points_[query], itself excluded.
  // Order: by cell (y major), then insertion order inside a cell.
  std::vector<int> within_radius(int query, double radius) const {
    const PlanarPoint q = points_[query];
    const auto [qx, qy] = cell_coords(q);
    const long long r = static_cast<long long>(std::ceil(radius / cell_)) + 1;
    std::vector<int> out;
    for (long long dy = -r; dy <= r; ++dy) {
      for (long long dx = -r; dx <= r; ++dx) {
        const auto it = cells_.find(pack(qx + dx, qy + dy));
        if (it == cells_.end()) continue;
        for (int idx : it->second) {
          if (idx == query) continue;
          if (squared_distance(q, points_[idx]) <= radius * radius) out.push_back(idx);
        }
      }
    }
    return out;
  }

 private:
  static std::uint64_t pack(long long ix, long long iy) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(iy));
  }

  std::pair<long long, long long> cell_coords(const PlanarPoint& p) const {
    return {static_cast<long long>(std::floor(p.x / cell_)),
            static_cast<long long>(std::floor(p.y / cell_))};
  }

  std::uint64_t key_of(const PlanarPoint& p) const {
    const auto [ix, iy] = cell_coords(p);
    return pack(ix, iy);
  }

  long long extent_cells() const {
    if (points_.empty()) return 1;
    double min_x = points_[0].x, max_x = points_[0].x;
    double min_y = points_[0].y, max_y = points_[0].y;
    for (const PlanarPoint& p : points_) {
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
    return static_cast<long long>(std::max(max_x - min_x, max_y - min_y) / cell_) + 1;
  }

  template <typename Fn>
  void visit_cell(long long ix, long long iy, Fn&& fn) const {
    const auto it = cells_.find(pack(ix, iy));
    if (it == cells_.end()) return;
    for (int idx : it->second) fn(idx);
  }

  // Cells at Chebyshev distance `ring` from (cx, cy), fixed traversal order.
  template <typename Fn>
  void visit_ring(long long cx, long long cy, long long ring, Fn&& fn) const {
    if (ring == 0) {
      visit_cell(cx, cy, fn);
      return;
    }
    for (long long dx = -ring; dx <= ring; ++dx) {
      visit_cell(cx + dx, cy - ring, fn);
      visit_cell(cx + dx, cy + ring, fn);
    }
    for (long long dy = -ring + 1; dy <= ring - 1; ++dy) {
      visit_cell(cx - ring, cy + dy, fn);
      visit_cell(cx + ring, cy + dy, fn);
    }
  }

  const std::vector<PlanarPoint>& points_;
  double cell_;
  long long max_ring_ = 1;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

}  // namespace gridgen
