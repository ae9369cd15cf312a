#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "gridgen/errors.hpp"
#include "gridgen/geo.hpp"
#include "gridgen/random.hpp"

namespace gridgen {

// One mixture component: mean (km) and full symmetric covariance (km^2).
struct Gaussian2 {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double cov_xx = 1.0;
  double cov_xy = 0.0;
  double cov_yy = 1.0;
};

// Fitted 2-D Gaussian mixture.
struct GmmModel {
  std::vector<double> weights;        // positive, sum to 1
  std::vector<Gaussian2> components;
  double loglik = 0.0;
  double bic = 0.0;
  int n_fit = 0;
  std::optional<GeoPoint> projection_center;  // absent for synthetic models
  std::uint64_t seed = 0;
  std::vector<double> loglik_history;  // per-iteration loglik of the winning restart

  int component_count() const { return static_cast<int>(weights.size()); }
};

struct EmConfig {
  int max_iters = 500;
  double rel_tol = 1e-6;   // relative log-likelihood change at convergence
  int restarts = 5;
  // Ridge added to covariance diagonals each M-step. Defaults to
  // 1e-6 x mean coordinate variance of the data.
  std::optional<double> cov_floor;
};

// BIC with the maximize convention: 2*loglik - p*ln(n), p = 6c - 1
// (c-1 free weights, 2c mean entries, 3c free covariance entries).
inline double bic(double loglik, int c, double n_fit) {
  if (c < 1 || n_fit < 1.0) throw input_error("bic: c and n_fit must be >= 1");
  const double p = 6.0 * c - 1.0;
  return 2.0 * loglik - p * std::log(n_fit);
}

inline void validate(const GmmModel& m) {
  if (m.weights.empty() || m.weights.size() != m.components.size())
    throw input_error("mixture model is empty or inconsistent");
  double sum = 0.0;
  for (double w : m.weights) {
    if (!(w > 0.0)) throw input_error("mixture weight must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw input_error("mixture weights do not sum to 1");
  for (const Gaussian2& g : m.components) {
    const double det = g.cov_xx * g.cov_yy - g.cov_xy * g.cov_xy;
    if (!(det > 0.0) || !(g.cov_xx + g.cov_yy > 0.0) || !(g.cov_xx > 0.0))
      throw input_error("mixture covariance is not positive definite");
    if (!std::isfinite(g.mean_x) || !std::isfinite(g.mean_y))
      throw input_error("mixture mean is not finite");
  }
}

namespace detail {

inline constexpr double kLog2Pi = 1.8378770664093454836;

struct GaussianPrep {
  double mx, my;
  double ixx, ixy, iyy;  // inverse covariance
  double log_norm;       // -log(2*pi) - 0.5*log(det)
};

inline GaussianPrep prep_gaussian(const Gaussian2& g) {
  const double det = g.cov_xx * g.cov_yy - g.cov_xy * g.cov_xy;
  if (!(det > 0.0) || !(g.cov_xx > 0.0))
    throw numeric_error("covariance matrix is singular");
  GaussianPrep p;
  p.mx = g.mean_x;
  p.my = g.mean_y;
  p.ixx = g.cov_yy / det;
  p.ixy = -g.cov_xy / det;
  p.iyy = g.cov_xx / det;
  p.log_norm = -kLog2Pi - 0.5 * std::log(det);
  return p;
}

inline double log_density(const GaussianPrep& g, const PlanarPoint& p) {
  const double dx = p.x - g.mx;
  const double dy = p.y - g.my;
  return g.log_norm - 0.5 * (g.ixx * dx * dx + 2.0 * g.ixy * dx * dy + g.iyy * dy * dy);
}

// Posterior component probabilities for one point; they sum to 1.
inline std::vector<double> responsibilities(const GmmModel& m, const PlanarPoint& p) {
  const int c = m.component_count();
  std::vector<double> lp(c);
  double mx = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < c; ++j) {
    lp[j] = std::log(m.weights[j]) + log_density(prep_gaussian(m.components[j]), p);
    mx = std::max(mx, lp[j]);
  }
  double z = 0.0;
  for (int j = 0; j < c; ++j) z += std::exp(lp[j] - mx);
  std::vector<double> r(c);
  for (int j = 0; j < c; ++j) r[j] = std::exp(lp[j] - mx) / z;
  return r;
}

// k-means++ style seeding: first center uniform, later centers drawn with
// probability proportional to squared distance from the chosen set.
inline std::vector<int> kmeanspp_centers(const std::vector<PlanarPoint>& pts, int c, Rng& rng) {
  const int n = static_cast<int>(pts.size());
  std::vector<int> centers;
  centers.reserve(c);
  centers.push_back(static_cast<int>(rng.below(n)));
  std::vector<double> d2(n);
  for (int i = 0; i < n; ++i) d2[i] = squared_distance(pts[i], pts[centers[0]]);
  while (static_cast<int>(centers.size()) < c) {
    double total = 0.0;
    for (double v : d2) total += v;
    int pick;
    if (total > 0.0) {
      pick = pick_weighted(d2, total, rng);
    } else {
      pick = static_cast<int>(rng.below(n));  // all mass collapsed; any point works
    }
    centers.push_back(pick);
    for (int i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(pts[i], pts[pick]));
  }
  return centers;
}

struct EmRun {
  std::vector<double> weights;
  std::vector<Gaussian2> components;
  double loglik = -std::numeric_limits<double>::infinity();
  std::vector<double> history;
};

inline Gaussian2 scatter_covariance(const std::vector<PlanarPoint>& pts,
                                    const std::vector<int>& members, double mx, double my,
                                    double floor) {
  Gaussian2 g;
  g.mean_x = mx;
  g.mean_y = my;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i : members) {
    const double dx = pts[i].x - mx;
    const double dy = pts[i].y - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double denom = std::max<std::size_t>(members.size(), 1);
  g.cov_xx = sxx / denom + floor;
  g.cov_xy = sxy / denom;
  g.cov_yy = syy / denom + floor;
  return g;
}

inline EmRun run_em(const std::vector<PlanarPoint>& pts, int c, Rng& rng, const EmConfig& cfg,
                    double floor) {
  const int n = static_cast<int>(pts.size());
  EmRun run;

  // init from k-means++ hard assignment
  const std::vector<int> centers = kmeanspp_centers(pts, c, rng);
  std::vector<std::vector<int>> clusters(c);
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double bd = squared_distance(pts[i], pts[centers[0]]);
    for (int j = 1; j < c; ++j) {
      const double d = squared_distance(pts[i], pts[centers[j]]);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    clusters[best].push_back(i);
  }
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  double gx = 0.0, gy = 0.0;
  for (const PlanarPoint& p : pts) {
    gx += p.x;
    gy += p.y;
  }
  gx /= n;
  gy /= n;
  const Gaussian2 global_cov = scatter_covariance(pts, all, gx, gy, floor);

  run.weights.resize(c);
  run.components.resize(c);
  for (int j = 0; j < c; ++j) {
    run.weights[j] = (clusters[j].size() + 1.0) / (n + c);  // smoothed, stays positive
    if (clusters[j].size() >= 2) {
      double mx = 0.0, my = 0.0;
      for (int i : clusters[j]) {
        mx += pts[i].x;
        my += pts[i].y;
      }
      mx /= clusters[j].size();
      my /= clusters[j].size();
      run.components[j] = scatter_covariance(pts, clusters[j], mx, my, floor);
    } else {
      run.components[j] = global_cov;
      run.components[j].mean_x = pts[centers[j]].x;
      run.components[j].mean_y = pts[centers[j]].y;
    }
  }

  std::vector<double> resp(static_cast<std::size_t>(n) * c);
  std::vector<double> lp(c);
  double prev = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    // E-step; also the exact loglik of the current parameters
    std::vector<GaussianPrep> prep(c);
    std::vector<double> logw(c);
    for (int j = 0; j < c; ++j) {
      prep[j] = prep_gaussian(run.components[j]);
      logw[j] = std::log(run.weights[j]);
    }
    double ll = 0.0;
    for (int i = 0; i < n; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < c; ++j) {
        lp[j] = logw[j] + log_density(prep[j], pts[i]);
        mx = std::max(mx, lp[j]);
      }
      double z = 0.0;
      for (int j = 0; j < c; ++j) z += std::exp(lp[j] - mx);
      ll += mx + std::log(z);
      for (int j = 0; j < c; ++j) resp[static_cast<std::size_t>(i) * c + j] = std::exp(lp[j] - mx) / z;
    }
    if (!std::isfinite(ll)) throw numeric_error("EM log-likelihood diverged");
    run.history.push_back(ll);
    run.loglik = ll;
    if (iter > 0 && std::abs(ll - prev) <= cfg.rel_tol * (std::abs(ll) + 1.0)) break;
    prev = ll;

    // M-step with ridge floor on the covariances
    double wsum = 0.0;
    for (int j = 0; j < c; ++j) {
      double nk = 0.0, mx2 = 0.0, my2 = 0.0;
      for (int i = 0; i < n; ++i) {
        const double r = resp[static_cast<std::size_t>(i) * c + j];
        nk += r;
        mx2 += r * pts[i].x;
        my2 += r * pts[i].y;
      }
      if (nk < 1e-12) {
        // collapsed component: keep its parameters, give it negligible weight
        run.weights[j] = 1e-12;
        wsum += run.weights[j];
        continue;
      }
      mx2 /= nk;
      my2 /= nk;
      double sxx = 0.0, sxy = 0.0, syy = 0.0;
      for (int i = 0; i < n; ++i) {
        const double r = resp[static_cast<std::size_t>(i) * c + j];
        const double dx = pts[i].x - mx2;
        const double dy = pts[i].y - my2;
        sxx += r * dx * dx;
        sxy += r * dx * dy;
        syy += r * dy * dy;
      }
      run.components[j].mean_x = mx2;
      run.components[j].mean_y = my2;
      run.components[j].cov_xx = sxx / nk + floor;
      run.components[j].cov_xy = sxy / nk;
      run.components[j].cov_yy = syy / nk + floor;
      run.weights[j] = nk / n;
      wsum += run.weights[j];
    }
    for (int j = 0; j < c; ++j) run.weights[j] /= wsum;
  }
  return run;
}

inline double resolve_cov_floor(const std::vector<PlanarPoint>& pts, const EmConfig& cfg) {
  if (cfg.cov_floor) {
    if (!(*cfg.cov_floor > 0.0)) throw input_error("cov_floor must be positive");
    return *cfg.cov_floor;
  }
  const int n = static_cast<int>(pts.size());
  double mx = 0.0, my = 0.0;
  for (const PlanarPoint& p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  double vx = 0.0, vy = 0.0;
  for (const PlanarPoint& p : pts) {
    vx += (p.x - mx) * (p.x - mx);
    vy += (p.y - my) * (p.y - my);
  }
  const double mean_var = 0.5 * (vx + vy) / n;
  return std::max(1e-6 * mean_var, 1e-12);
}

}  // namespace detail

// Full-covariance EM fit with k-means++ restarts; returns the restart with
// the highest log-likelihood. Deterministic given `seed`.
inline GmmModel fit_em(const std::vector<PlanarPoint>& points, int c, std::uint64_t seed,
                       const EmConfig& cfg = {}) {
  const int n = static_cast<int>(points.size());
  if (c < 1) throw input_error("fit_em: component count must be >= 1");
  if (c > n) throw input_error("fit_em: more components than points");
  if (cfg.max_iters < 1 || cfg.restarts < 1 || !(cfg.rel_tol > 0.0))
    throw input_error("fit_em: invalid EM configuration");

  bool all_same = true;
  for (int i = 1; i < n && all_same; ++i)
    all_same = points[i].x == points[0].x && points[i].y == points[0].y;
  if (all_same && c > 1) throw input_error("fit_em: degenerate data");

  const double floor = detail::resolve_cov_floor(points, cfg);

  detail::EmRun best;
  bool have_best = false;
  for (int r = 0; r < cfg.restarts; ++r) {
    Rng rng(stage_seed(seed, static_cast<std::uint64_t>(r)));
    detail::EmRun run = detail::run_em(points, c, rng, cfg, floor);
    if (!have_best || run.loglik > best.loglik) {
      best = std::move(run);
      have_best = true;
    }
  }

  GmmModel model;
  model.weights = std::move(best.weights);
  model.components = std::move(best.components);
  model.loglik = best.loglik;
  model.loglik_history = std::move(best.history);
  model.n_fit = n;
  model.bic = bic(model.loglik, c, static_cast<double>(n));
  model.seed = seed;
  if (!std::isfinite(model.loglik)) throw numeric_error("fit_em: non-finite log-likelihood");
  return model;
}

struct CandidateScore {
  int c = 0;
  double loglik = 0.0;
  double bic = 0.0;
};

// Fits every c in [c_min, c_max] and returns the fit with maximum BIC; ties
// resolve toward smaller c. `scores` (optional) receives one row per candidate.
inline GmmModel select_model(const std::vector<PlanarPoint>& points, int c_min, int c_max,
                             std::uint64_t seed, const EmConfig& cfg = {},
                             std::vector<CandidateScore>* scores = nullptr) {
  if (c_min < 1 || c_max < c_min) throw input_error("select_model: empty component range");
  GmmModel best;
  bool have_best = false;
  for (int c = c_min; c <= c_max; ++c) {
    GmmModel m = fit_em(points, c, seed, cfg);
    if (scores) scores->push_back({c, m.loglik, m.bic});
    if (!have_best || m.bic > best.bic) {
      best = std::move(m);
      have_best = true;
    }
  }
  return best;
}

// Draws n i.i.d. points from the mixture: component via the categorical
// weights, then the Gaussian via its Cholesky factor. Deterministic given seed.
inline std::vector<PlanarPoint> sample(const GmmModel& model, int n, std::uint64_t seed) {
  if (n < 0) throw input_error("sample: n must be >= 0");
  validate(model);
  const int c = model.component_count();
  struct Chol {
    double mx, my, lxx, lyx, lyy;
  };
  std::vector<Chol> chol(c);
  for (int j = 0; j < c; ++j) {
    const Gaussian2& g = model.components[j];
    const double lxx = std::sqrt(g.cov_xx);
    const double lyx = g.cov_xy / lxx;
    const double rest = g.cov_yy - lyx * lyx;
    if (!(rest > 0.0)) throw numeric_error("sample: covariance not positive definite");
    chol[j] = {g.mean_x, g.mean_y, lxx, lyx, std::sqrt(rest)};
  }
  Rng rng(seed);
  std::vector<PlanarPoint> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    int z = c - 1;
    double cum = 0.0;
    for (int j = 0; j < c; ++j) {
      cum += model.weights[j];
      if (u < cum) {
        z = j;
        break;
      }
    }
    const double e1 = rng.normal();
    const double e2 = rng.normal();
    out.push_back({chol[z].mx + chol[z].lxx * e1, chol[z].my + chol[z].lyx * e1 + chol[z].lyy * e2});
  }
  return out;
}

}  // namespace gridgen
