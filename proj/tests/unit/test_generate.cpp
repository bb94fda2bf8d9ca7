#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "magnet/generate.hpp"
#include "magnet/theory.hpp"

using namespace magnet;

namespace {

const SimplifiedTheta kWeakCore = SimplifiedTheta::make(0.85, 0.30, 0.25);

bool within_sigmas(double observed, double mean, double sd, double k) {
  return std::abs(observed - mean) <= k * sd;
}

}  // namespace

TEST_CASE("graph normalizes, sorts and validates") {
  const Graph g(4, {{3, 1}, {0, 2}, {2, 1}}, false);
  REQUIRE(g.num_edges() == 3);
  CHECK(g.edges()[0] == Edge{0, 2});
  CHECK(g.edges()[1] == Edge{1, 2});
  CHECK(g.edges()[2] == Edge{1, 3});
  CHECK_THROWS_AS(Graph(4, {{0, 1}, {1, 0}}, false), Error);
  CHECK_THROWS_AS(Graph(4, {{0, 4}}, false), Error);
  CHECK_THROWS_AS(Graph(4, {{2, 2}}, false), Error);
  CHECK_NOTHROW(Graph(4, {{2, 2}}, true));
}

TEST_CASE("degree_sequence examples") {
  CHECK(degree_sequence(Graph(3, {{0, 1}, {1, 2}, {0, 2}}, false)) == std::vector<std::size_t>{2, 2, 2});
  CHECK(degree_sequence(Graph(2, {{0, 0}}, true)) == std::vector<std::size_t>{2, 0});
  CHECK(degree_sequence(Graph(3, {{0, 1}, {1, 2}}, false)) == std::vector<std::size_t>{1, 2, 1});
}

TEST_CASE("ER reduction on the naive path") {
  const auto p = SimplifiedTheta::make(0.5, 0.5, 0.5);
  const auto c = MagConfig::simplified(100, 1, 0.5, p);
  const auto a = sample_attributes(c, 1);
  const auto g = generate_naive(c, a, 2);
  CHECK(within_sigmas(static_cast<double>(g.num_edges()), 2475.0, 35.2, 4.0));
}

TEST_CASE("mu = 1 binomial edge count on both paths") {
  const auto c = MagConfig::simplified(50, 2, 1.0, SimplifiedTheta::make(0.9, 0.5, 0.2));
  const auto a = sample_attributes(c, 1);
  const double mean = 1225 * 0.81, sd = std::sqrt(1225 * 0.81 * 0.19);
  CHECK(within_sigmas(static_cast<double>(generate_naive(c, a, 3).num_edges()), mean, sd, 4.0));
  CHECK(within_sigmas(static_cast<double>(generate_bucketed(c, a, 3).num_edges()), mean, sd, 4.0));
}

TEST_CASE("single dense bucket is near-complete") {
  const auto c = MagConfig::simplified(200, 1, 1.0, SimplifiedTheta::make(0.999, 0.5, 0.2));
  const auto a = sample_attributes(c, 1);
  CHECK(static_cast<double>(generate_bucketed(c, a, 9).num_edges()) >= 0.99 * 19900);
}

TEST_CASE("both paths track the edge-count closed form") {
  const auto c = MagConfig::simplified(1024, 8, 0.45, kWeakCore);
  const double expected = expected_edges(c);
  for (auto method : {GenerationMethod::kNaive, GenerationMethod::kBucketed}) {
    double sum = 0.0, sum_sq = 0.0;
    const int seeds = 30;
    for (int s = 0; s < seeds; ++s) {
      const double m = static_cast<double>(generate(c, 1000 + s, method).graph.num_edges());
      sum += m;
      sum_sq += m * m;
    }
    const double mean = sum / seeds;
    const double se = std::sqrt((sum_sq / seeds - mean * mean) * seeds / (seeds - 1) / seeds);
    CHECK(std::abs(mean - expected) <= 3 * se);
  }
}

TEST_CASE("per-pair edge frequency matches edge_probability on both paths") {
  const AffinityMatrix m3(3, {0.9, 0.2, 0.1, 0.2, 0.5, 0.3, 0.1, 0.3, 0.7});
  const auto c = MagConfig::general(
      12, {CategoricalAttribute{{0.3, 0.3, 0.4}, m3}, CategoricalAttribute{{0.6, 0.4}, kWeakCore.matrix()}},
      true);
  const auto a = sample_attributes(c, 17);
  const int trials = 4000;
  for (auto method : {GenerationMethod::kNaive, GenerationMethod::kBucketed}) {
    std::vector<double> hits(12 * 12, 0.0);
    for (int s = 0; s < trials; ++s) {
      const auto g = method == GenerationMethod::kNaive ? generate_naive(c, a, s)
                                                         : generate_bucketed(c, a, s);
      for (const auto& e : g.edges()) hits[e.u * 12 + e.v] += 1.0;
    }
    int bad = 0;
    for (std::size_t u = 0; u < 12; ++u) {
      for (std::size_t v = u; v < 12; ++v) {
        const double p = edge_probability(a.row(u), a.row(v), c);
        const double se = std::sqrt(p * (1 - p) / trials);
        if (std::abs(hits[u * 12 + v] / trials - p) > 4 * se) ++bad;
      }
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("generation is deterministic and independent of thread count") {
  const auto c = MagConfig::simplified(3000, 10, 0.45, kWeakCore);
  const auto a = sample_attributes(c, 4);
  for (auto gen : {&generate_naive, &generate_bucketed}) {
    const auto one = gen(c, a, 77, GenerateOptions{1});
    const auto four = gen(c, a, 77, GenerateOptions{4});
    CHECK(one == four);
    CHECK(one == gen(c, a, 77, GenerateOptions{1}));
    CHECK_FALSE(one == gen(c, a, 78, GenerateOptions{1}));
  }
}

TEST_CASE("bucket index covers every node once and every pair once") {
  const auto c = MagConfig::simplified(500, 4, 0.4, kWeakCore);
  const auto a = sample_attributes(c, 2);
  const BucketIndex index(a);
  std::vector<int> seen(500, 0);
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto& bucket = index.buckets()[i];
    for (auto u : bucket.nodes) {
      ++seen[u];
      CHECK(std::equal(bucket.key.begin(), bucket.key.end(), a.row(u).begin()));
    }
    const std::size_t m = bucket.nodes.size();
    pairs += m * (m - 1) / 2;
    for (std::size_t j = i + 1; j < index.size(); ++j) pairs += m * index.buckets()[j].nodes.size();
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
  CHECK(pairs == 500 * 499 / 2);
}

TEST_CASE("self-edges only appear when enabled and follow the closed form") {
  const auto c = MagConfig::simplified(400, 3, 0.5, kWeakCore, true);
  double self = 0.0;
  for (int s = 0; s < 20; ++s) {
    const auto g = generate(c, s).graph;
    for (const auto& e : g.edges()) self += e.u == e.v;
  }
  const double per_node = std::pow(0.5 * 0.85 + 0.5 * 0.25, 3);
  const double mean = 20 * 400 * per_node;
  CHECK(within_sigmas(self, mean, std::sqrt(mean * (1 - per_node)), 4.0));
  const auto off = generate(c.with_self_edges(false), 1).graph;
  for (const auto& e : off.edges()) CHECK(e.u != e.v);
}

TEST_CASE("empty bucket pairs cost time proportional to edges drawn") {
  const auto tiny = SimplifiedTheta::make(1e-9, 1e-9, 1e-9);
  const auto c = MagConfig::simplified(2000, 1, 0.5, tiny);
  const auto a = sample_attributes(c, 1);
  const auto start = std::chrono::steady_clock::now();
  std::size_t edges = 0;
  const int calls = 50;
  for (int s = 0; s < calls; ++s) edges += generate_bucketed(c, a, s).num_edges();
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  // Three bucket pairs per call, each spanning about a million implicit pairs.
  CHECK(ms / (3.0 * calls) < 1.0);
  CHECK(edges <= 2);
}

TEST_CASE("edge list round-trips bit-exactly") {
  const auto g = generate(MagConfig::simplified(300, 6, 0.5, kWeakCore, true), 5).graph;
  std::stringstream s;
  write_edge_list(s, g);
  const std::string text = s.str();
  CHECK(text.rfind("# nodes 300\n# self_edges 1\n", 0) == 0);
  const auto back = read_edge_list(s);
  CHECK(back == g);
  std::stringstream again;
  write_edge_list(again, back);
  CHECK(again.str() == text);
}

TEST_CASE("edge list reader rejects malformed input with line numbers") {
  std::stringstream missing("0\t1\n");
  CHECK_THROWS_AS(read_edge_list(missing), Error);
  std::stringstream bad("# nodes 3\n# self_edges 0\n0\t1\n1\tx\n");
  try {
    read_edge_list(bad);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIo);
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}

TEST_CASE("capacity budget is enforced") {
  const auto c = MagConfig::simplified(1000, 8, 0.5, kWeakCore);
  const auto a = sample_attributes(c, 1);
  GenerateOptions small;
  small.max_attribute_cells = 100;
  try {
    generate_naive(c, a, 1, small);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kCapacity);
  }
}
