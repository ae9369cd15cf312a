#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace gridgen {

// splitmix64 mixing function (Steele, Lea, Flood 2014).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Sub-seed for pipeline stage `stage` of a run seeded `run_seed`:
//   stage_seed = splitmix64(run_seed + (stage + 1) * 0x9e3779b97f4a7c15)
// so every stage is independently reproducible from the run seed.
inline std::uint64_t stage_seed(std::uint64_t run_seed, std::uint64_t stage) {
  return splitmix64(run_seed + (stage + 1) * 0x9e3779b97f4a7c15ull);
}

// Deterministic PRNG with hand-rolled distributions. The stream depends only
// on the seed, not on the standard library, so identical seeds give identical
// output everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix64(seed ^ 0x6a09e667f3bcc909ull)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, bound), bound > 0. Rejection keeps it unbiased.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Standard normal via Box-Muller; the spare draw is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Index draw from non-negative weights with known total. Walks the CDF and
// returns the first index whose cumulative weight exceeds the draw.
inline int pick_weighted(const std::vector<double>& weights, double total, Rng& rng) {
  const double u = rng.uniform(0.0, total);
  double acc = 0.0;
  int last = -1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last = static_cast<int>(i);
    acc += weights[i];
    if (acc > u) return last;
  }
  return last;  // numeric slack: u landed at/past the accumulated total
}

}  // namespace gridgen
