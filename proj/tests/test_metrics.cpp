#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gridgen/generator.hpp"
#include "gridgen/metrics.hpp"
#include "oracles.hpp"

using namespace gridgen;

namespace {

SpatialGraph graph_from_edges(int n, std::vector<std::pair<int, int>> edges) {
  SpatialGraph g;
  g.nodes.resize(n);
  for (int i = 0; i < n; ++i) g.nodes[i].pos = {static_cast<double>(i), 0.0};
  for (auto [u, v] : edges) g.edges.push_back({std::min(u, v), std::max(u, v), std::nullopt, 1});
  return g;
}

SpatialGraph complete_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return graph_from_edges(n, std::move(e));
}

std::vector<double> gaussian_sample(int n, double mean, double sd, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = mean + sd * rng.normal();
  return v;
}

}  // namespace

TEST_CASE("average path length of complete graphs is 1") {
  for (int n : {2, 5, 9}) CHECK(avg_path_length(complete_graph(n)).value == doctest::Approx(1.0));
}

TEST_CASE("average path length of a 3-path is 4/3") {
  const auto g = graph_from_edges(3, {{0, 1}, {1, 2}});
  CHECK(avg_path_length(g).value == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("exact average path length matches Floyd-Warshall") {
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 50 + static_cast<int>(Rng(trial).below(150));
    const auto g = oracles::random_connected_graph(n, n / 3, 9000 + trial);
    const double expect = oracles::floyd_warshall_apl(g);
    REQUIRE(expect >= 0.0);
    CHECK(std::abs(avg_path_length(g).value - expect) <= 1e-12);
  }
}

TEST_CASE("exact mode rejects disconnected graphs") {
  const auto g = graph_from_edges(4, {{0, 1}, {2, 3}});
  CHECK_THROWS_WITH_AS(avg_path_length(g), "graph disconnected", graph_state_error);
  AplMode sampled;
  sampled.sample_sources = 2;
  CHECK_THROWS_AS(avg_path_length(g, sampled), graph_state_error);
}

TEST_CASE("sampled path length with all sources equals exact; fewer sources stay close") {
  const auto g = oracles::random_connected_graph(300, 150, 77);
  const double exact = avg_path_length(g).value;
  AplMode all;
  all.sample_sources = 300;
  CHECK(avg_path_length(g, all).value == doctest::Approx(exact));
  AplMode some;
  some.sample_sources = 60;
  some.seed = 5;
  const AplResult est = avg_path_length(g, some);
  REQUIRE(est.standard_error.has_value());
  CHECK(*est.standard_error > 0.0);
  CHECK(std::abs(est.value - exact) <= 5.0 * *est.standard_error);
}

TEST_CASE("clustering of a triangle is 1") {
  CHECK(clustering_coefficient(complete_graph(3)).average == doctest::Approx(1.0));
}

TEST_CASE("clustering of a 3-leaf star is 0") {
  const auto g = graph_from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
  CHECK(clustering_coefficient(g).average == 0.0);
}

TEST_CASE("clustering of K4 minus one edge is 5/6") {
  const auto g = graph_from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}});
  CHECK(clustering_coefficient(g).average == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("clustering matches the triangle-enumeration oracle") {
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = oracles::random_connected_graph(40, 60, 300 + trial);
    CHECK(clustering_coefficient(g).average ==
          doctest::Approx(oracles::clustering_by_triples(g)).epsilon(1e-12));
  }
}

TEST_CASE("clustering rejects the empty graph") {
  SpatialGraph g;
  CHECK_THROWS_AS(clustering_coefficient(g), input_error);
}

TEST_CASE("degree histogram") {
  CHECK(degree_histogram(complete_graph(3)).counts == std::map<int, int>{{2, 3}});
  const auto star = graph_from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
  CHECK(degree_histogram(star).counts == std::map<int, int>{{1, 3}, {3, 1}});
}

TEST_CASE("degree histogram satisfies the handshake identity") {
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = oracles::random_connected_graph(80, 40, 50 + trial);
    long long sum = 0;
    for (const auto& [d, cnt] : degree_histogram(g).counts) sum += static_cast<long long>(d) * cnt;
    CHECK(sum == 2LL * g.edge_count());
  }
}

TEST_CASE("tail slope recovers a constructed power law") {
  DegreeHistogram h;
  for (int d = 3; d <= 20; ++d)
    h.counts[d] = static_cast<int>(std::lround(1e6 * std::pow(d, -3.0)));
  CHECK(tail_slope(h, 2) == doctest::Approx(-3.0).epsilon(0.017));  // within 0.05 absolute
  CHECK(std::abs(tail_slope(h, 2) + 3.0) < 0.05);
}

TEST_CASE("flat tail has slope 0") {
  DegreeHistogram h;
  h.counts[4] = 10;
  h.counts[9] = 10;
  CHECK(tail_slope(h, 2) == doctest::Approx(0.0));
}

TEST_CASE("tail slope needs at least two usable degrees") {
  DegreeHistogram h;
  h.counts[2] = 5;
  h.counts[3] = 7;
  CHECK_THROWS_AS(tail_slope(h, 3), input_error);
}

TEST_CASE("tail slope is invariant to scaling the counts") {
  DegreeHistogram h, h7;
  for (int d = 2; d <= 12; ++d) {
    h.counts[d] = 3 * d * d;
    h7.counts[d] = 7 * 3 * d * d;
  }
  CHECK(tail_slope(h, 1) == doctest::Approx(tail_slope(h7, 1)).epsilon(1e-12));
}

TEST_CASE("KS statistic on hand-computed fixtures") {
  CHECK(ks_statistic(std::vector<int>{3, 1, 4, 1, 5}, std::vector<int>{3, 1, 4, 1, 5}) == 0.0);
  CHECK(ks_statistic(std::vector<int>{1, 1}, std::vector<int>{2, 2}) == 1.0);
  CHECK(ks_statistic(std::vector<int>{1, 1, 2, 2}, std::vector<int>{1, 2, 2, 2}) ==
        doctest::Approx(0.25));
  CHECK_THROWS_AS(ks_statistic(std::vector<double>{}, std::vector<double>{1.0}), input_error);
}

TEST_CASE("KS statistic is symmetric and within [0,1]") {
  Rng rng(404);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(30), b(45);
    for (double& x : a) x = static_cast<double>(rng.below(12));
    for (double& x : b) x = static_cast<double>(rng.below(12));
    const double ab = ks_statistic(a, b);
    CHECK(ab == ks_statistic(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("KL of a sample against itself is ~0") {
  const auto p = gaussian_sample(10000, 0.0, 1.0, 2718);
  CHECK(std::abs(kl_divergence(p, p, 10)) <= 0.05);
  // two independent draws from the same distribution
  const auto q = gaussian_sample(10000, 0.0, 1.0, 2719);
  CHECK(std::abs(kl_divergence(p, q, 10)) <= 0.05);
}

TEST_CASE("KL of N(0,1) vs N(1,1) estimates the closed form 0.5") {
  const auto p = gaussian_sample(10000, 0.0, 1.0, 31);
  const auto q = gaussian_sample(10000, 1.0, 1.0, 32);
  CHECK(std::abs(kl_divergence(p, q, 10) - 0.5) <= 0.1);
}

TEST_CASE("KL is asymmetric for exponential vs uniform") {
  // D(U||exp) is finite (0.4014 by quadrature); D(exp||U) is infinite, so its
  // estimate keeps growing with the sample and the two directions separate.
  Rng rng(161803);
  std::vector<double> expo(50000), uni(50000);
  for (double& x : expo) x = -std::log(1.0 - rng.uniform01());
  for (double& x : uni) x = rng.uniform(0.0, 3.0);
  const double expect = oracles::simpson(0.0, 3.0, 2000, [](double x) {
    return (1.0 / 3.0) * (std::log(1.0 / 3.0) + x);
  });
  CHECK(expect == doctest::Approx(std::log(1.0 / 3.0) + 1.5).epsilon(1e-9));
  const double d_uni_expo = kl_divergence(uni, expo, 5);
  const double d_expo_uni = kl_divergence(expo, uni, 5);
  CHECK(std::abs(d_uni_expo - expect) <= 0.1);
  CHECK(std::abs(d_expo_uni - d_uni_expo) > 0.05);
}

TEST_CASE("KL estimate error shrinks with the sample size") {
  const int sizes[3] = {1000, 10000, 100000};
  double medians[3];
  for (int s = 0; s < 3; ++s) {
    std::vector<double> errs;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto p = gaussian_sample(sizes[s], 0.0, 1.0, 100 + seed);
      const auto q = gaussian_sample(sizes[s], 1.0, 1.0, 200 + seed);
      errs.push_back(std::abs(kl_divergence(p, q, 10) - 0.5));
    }
    std::sort(errs.begin(), errs.end());
    medians[s] = 0.5 * (errs[4] + errs[5]);
  }
  CHECK(medians[0] > medians[1]);
  CHECK(medians[1] > medians[2]);
}

TEST_CASE("KL rejects undersized samples") {
  const std::vector<double> tiny{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(kl_divergence(tiny, tiny, 3), input_error);
  CHECK_THROWS_AS(kl_divergence({1.0, 2.0, 3.0, 4.0}, {1.0}, 3), input_error);
}

TEST_CASE("edge lengths") {
  SpatialGraph g;
  CHECK(edge_lengths(g, LengthKind::straight).empty());
  g.nodes.resize(3);
  g.nodes[0].pos = {0, 0};
  g.nodes[1].pos = {3, 4};
  g.nodes[2].pos = {3, 0};
  g.edges.push_back({0, 1, 6.5, 1});
  g.edges.push_back({1, 2, std::nullopt, 1});
  const auto straight = edge_lengths(g, LengthKind::straight);
  CHECK(straight[0] == doctest::Approx(5.0));
  CHECK(straight[1] == doctest::Approx(4.0));
  CHECK_THROWS_AS(edge_lengths(g, LengthKind::actual), input_error);  // one edge lacks it
  g.edges[1].actual_km = 4.25;
  const auto actual = edge_lengths(g, LengthKind::actual);
  CHECK(actual[0] == 6.5);
  CHECK(actual[1] == 4.25);
}

TEST_CASE("straight edge length equals the endpoint distance on generated graphs") {
  const auto g = oracles::random_connected_graph(60, 30, 8);
  const auto lens = edge_lengths(g, LengthKind::straight);
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    CHECK(std::abs(lens[i] - distance(g.nodes[g.edges[i].u].pos, g.nodes[g.edges[i].v].pos)) <=
          1e-12);
}

TEST_CASE("structural report of a triangle") {
  const auto g = complete_graph(3);
  const MetricsReport r = structural_report(g, nullptr);
  CHECK(r.n == 3);
  CHECK(r.m == 3);
  CHECK(r.avg_path_length == doctest::Approx(1.0));
  CHECK(r.clustering == doctest::Approx(1.0));
  CHECK(!r.zeta.has_value());  // single degree value: no tail to fit
  CHECK(r.component_count == 1);
  CHECK(!r.d_ks.has_value());
}

TEST_CASE("structural report against itself") {
  GmmModel m;
  m.weights = {1.0};
  m.components.push_back({0.0, 0.0, 400.0, 0.0, 400.0});
  GenParams p;
  p.n_target = 300;
  p.m_target = 380;
  p.mode = NetworkMode::small;
  p.seed = 6;
  const SpatialGraph g = gnlg(m, p);
  const MetricsReport r = structural_report(g, &g);
  REQUIRE(r.d_ks.has_value());
  REQUIRE(r.d_kl.has_value());
  CHECK(*r.d_ks == 0.0);
  CHECK(std::abs(*r.d_kl) <= 0.05);
}

TEST_CASE("length statistics") {
  const LengthStats s = length_stats({2.0, 4.0, 9.0});
  CHECK(s.mean == doctest::Approx(5.0));
  CHECK(s.max == 9.0);
  CHECK(s.stddev == doctest::Approx(std::sqrt(((9.0) + (1.0) + (16.0)) / 2.0)));
  const LengthStats empty = length_stats({});
  CHECK(empty.mean == 0.0);
  CHECK(empty.stddev == 0.0);
  CHECK(empty.max == 0.0);
}
