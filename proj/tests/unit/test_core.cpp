#include <doctest.h>

#include <cmath>
#include <sstream>

#include "magnet/core.hpp"
#include "magnet/rng.hpp"
#include "oracles.hpp"

using namespace magnet;

namespace {

std::vector<AttributeValue> bits(std::initializer_list<int> values) {
  std::vector<AttributeValue> out;
  for (int v : values) out.push_back(static_cast<AttributeValue>(v));
  return out;
}

const SimplifiedTheta kWeakCore = SimplifiedTheta::make(0.85, 0.30, 0.25);

}  // namespace

TEST_CASE("affinity matrix entries must lie strictly inside the unit interval") {
  CHECK_NOTHROW(AffinityMatrix(2, {0.5, 0.4, 0.4, 0.1}));
  CHECK_THROWS_AS(AffinityMatrix(2, {1.0, 0.4, 0.4, 0.1}), Error);
  CHECK_THROWS_AS(AffinityMatrix(2, {0.5, 0.0, 0.4, 0.1}), Error);
  CHECK_THROWS_AS(AffinityMatrix(2, {0.5, 0.4, 0.4}), Error);
  CHECK(AffinityMatrix(2, {0.5, 0.4, 0.4, 0.1}).symmetric());
  CHECK_FALSE(AffinityMatrix(2, {0.5, 0.4, 0.3, 0.1}).symmetric());
}

TEST_CASE("simplified theta core-periphery flag") {
  CHECK_NOTHROW(SimplifiedTheta::make(0.85, 0.7, 0.15, true));
  CHECK_THROWS_AS(SimplifiedTheta::make(0.3, 0.7, 0.15, true), Error);
  CHECK_NOTHROW(SimplifiedTheta::make(0.3, 0.7, 0.15));
  try {
    SimplifiedTheta::make(0.5, 1.2, 0.1);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidConfig);
  }
}

TEST_CASE("config validation and rho") {
  const auto c = MagConfig::simplified(1024, 8, 0.45, kWeakCore);
  CHECK(c.rho() == doctest::Approx(0.8).epsilon(1e-15));
  CHECK_THROWS_AS(MagConfig::simplified(0, 8, 0.45, kWeakCore), Error);
  CHECK_THROWS_AS(MagConfig::simplified(10, 0, 0.45, kWeakCore), Error);
  CHECK_THROWS_AS(MagConfig::simplified(10, 2, 1.5, kWeakCore), Error);
  CHECK_THROWS_AS(MagConfig::simplified(1, 2, 0.5, kWeakCore).rho(), Error);
  CHECK_THROWS_AS(
      MagConfig::general(10, {CategoricalAttribute{{0.5, 0.3, 0.2}, kWeakCore.matrix()}}), Error);
  CHECK_THROWS_AS(MagConfig::power_law(10, {0.5, 0.5}, {kWeakCore}), Error);
}

TEST_CASE("sample_attributes degenerate mu") {
  SUBCASE("mu = 1 gives the all-zero table") {
    const auto a = sample_attributes(MagConfig::simplified(50, 7, 1.0, kWeakCore), 3);
    for (auto v : a.values()) CHECK(v == 0);
  }
  SUBCASE("mu = 0 gives the all-one table") {
    const auto a = sample_attributes(MagConfig::simplified(3, 4, 0.0, kWeakCore), 3);
    for (auto v : a.values()) CHECK(v == 1);
  }
}

TEST_CASE("sample_attributes weight moments") {
  const auto a = sample_attributes(MagConfig::simplified(10000, 16, 0.5, kWeakCore), 11);
  double total = 0.0;
  for (std::size_t u = 0; u < a.n(); ++u) total += static_cast<double>(node_weight(a.row(u)));
  const double mean = total / 10000.0;
  CHECK(std::abs(mean - 8.0) <= 3 * 0.02);
}

TEST_CASE("sample_attributes per-attribute frequency within 4 standard errors") {
  const auto c = MagConfig::power_law(20000, {0.2, 0.5, 0.9, 0.35, 0.05},
                                      std::vector<SimplifiedTheta>(5, kWeakCore));
  const auto a = sample_attributes(c, 99);
  const std::vector<double> mus{0.2, 0.5, 0.9, 0.35, 0.05};
  for (std::size_t i = 0; i < 5; ++i) {
    double zeros = 0.0;
    for (std::size_t u = 0; u < a.n(); ++u) zeros += a.value(u, i) == 0;
    const double se = std::sqrt(mus[i] * (1 - mus[i]) / 20000.0);
    CHECK(std::abs(zeros / 20000.0 - mus[i]) <= 4 * se);
  }
}

TEST_CASE("sample_attributes is deterministic and seed sensitive") {
  const auto c = MagConfig::simplified(500, 9, 0.4, kWeakCore);
  CHECK(sample_attributes(c, 5) == sample_attributes(c, 5));
  CHECK_FALSE(sample_attributes(c, 5) == sample_attributes(c, 6));
}

TEST_CASE("general attributes follow their category distribution") {
  const AffinityMatrix m(3, {0.9, 0.2, 0.1, 0.2, 0.5, 0.3, 0.1, 0.3, 0.7});
  const auto c = MagConfig::general(30000, {CategoricalAttribute{{0.2, 0.3, 0.5}, m}});
  const auto a = sample_attributes(c, 4);
  std::vector<double> counts(3, 0.0);
  for (std::size_t u = 0; u < a.n(); ++u) counts[a.value(u, 0)] += 1.0;
  const std::vector<double> probs{0.2, 0.3, 0.5};
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(std::abs(counts[k] / 30000.0 - probs[k]) <= 4 * std::sqrt(probs[k] * (1 - probs[k]) / 30000.0));
}

TEST_CASE("edge_probability examples") {
  const auto c3 = MagConfig::simplified(10, 3, 0.5, kWeakCore);
  CHECK(edge_probability(bits({0, 0, 0}), bits({0, 0, 0}), c3) ==
        doctest::Approx(0.85 * 0.85 * 0.85).epsilon(1e-15));

  const auto c4 = MagConfig::simplified(10, 4, 0.5, kWeakCore);
  const double expected = 0.85 * 0.85 * 0.30 * 0.25;
  CHECK(edge_probability(bits({0, 0, 1, 0}), bits({0, 1, 1, 0}), c4) ==
        doctest::Approx(expected).epsilon(1e-15));

  const auto c2 = MagConfig::simplified(10, 2, 0.5, kWeakCore);
  CHECK(edge_probability(bits({0, 1}), bits({1, 0}), c2) == doctest::Approx(0.09).epsilon(1e-15));
}

TEST_CASE("edge_probability rejects bad rows") {
  const auto c = MagConfig::simplified(10, 2, 0.5, kWeakCore);
  CHECK_THROWS_AS(edge_probability(bits({0, 2}), bits({1, 0}), c), Error);
  CHECK_THROWS_AS(edge_probability(bits({0}), bits({1, 0}), c), Error);
}

TEST_CASE("shared_counts and node_weight examples") {
  CHECK(shared_counts(bits({0, 0, 1, 0}), bits({0, 1, 1, 0})) == SharedCounts{2, 1});
  CHECK(shared_counts(bits({0, 0, 0, 0, 0}), bits({0, 0, 0, 0, 0})) == SharedCounts{5, 0});
  CHECK(shared_counts(bits({0, 1}), bits({1, 0})) == SharedCounts{0, 0});
  CHECK_THROWS_AS(shared_counts(bits({0, 3}), bits({1, 0})), Error);

  CHECK(node_weight(bits({0, 0, 1, 0})) == 3);
  CHECK(node_weight(bits({1, 1, 1, 1, 1, 1, 1, 1})) == 0);
  CHECK(node_weight(bits({0, 0, 0, 0, 0, 0, 0, 0})) == 8);
  CHECK_THROWS_AS(node_weight(bits({0, 2})), Error);
}

TEST_CASE("factorization through shared counts on a fuzzed corpus") {
  for (std::size_t l : {1u, 5u, 31u, 64u, 70u}) {
    const auto c = MagConfig::simplified(200, l, 0.5, kWeakCore);
    const auto a = sample_attributes(c, l);
    for (std::size_t u = 0; u < 40; ++u) {
      for (std::size_t v = 0; v < 40; ++v) {
        const auto s = shared_counts(a.row(u), a.row(v));
        CHECK(s == shared_counts_packed(a.packed_row(u), a.packed_row(v), l));
        CHECK(node_weight(a.row(u)) + (l - node_weight(a.row(u))) == l);
        const double mixed = static_cast<double>(l - s.both_zero - s.both_one);
        const double formula = std::pow(0.85, static_cast<double>(s.both_zero)) *
                               std::pow(0.30, mixed) *
                               std::pow(0.25, static_cast<double>(s.both_one));
        const double p = edge_probability(a.row(u), a.row(v), c);
        CHECK(std::abs(p - formula) <= 1e-15 * std::max(1.0, formula) + 1e-300);
        CHECK(p == edge_probability(a.row(v), a.row(u), c));
      }
    }
  }
}

TEST_CASE("general edge probability is the product of selected entries") {
  const AffinityMatrix m3(3, {0.9, 0.2, 0.1, 0.2, 0.5, 0.3, 0.1, 0.3, 0.7});
  const auto c = MagConfig::general(
      5, {CategoricalAttribute{{0.2, 0.3, 0.5}, m3}, CategoricalAttribute{{0.5, 0.5}, kWeakCore.matrix()}});
  CHECK(edge_probability(bits({2, 0}), bits({1, 1}), c) == doctest::Approx(0.3 * 0.30).epsilon(1e-15));
  CHECK_THROWS_AS(edge_probability(bits({3, 0}), bits({1, 1}), c), Error);
}

TEST_CASE("log-space evaluation for long rows stays accurate") {
  const auto c = MagConfig::simplified(4, 200, 0.5, kWeakCore);
  std::vector<AttributeValue> u(200, 0), v(200, 1);
  CHECK(edge_probability(u, u, c) == doctest::Approx(std::pow(0.85, 200)).epsilon(1e-12));
  CHECK(edge_probability(u, v, c) == doctest::Approx(std::pow(0.30, 200)).epsilon(1e-12));
}

TEST_CASE("kronecker_to_mag matches a brute-force tensor power") {
  const std::vector<std::vector<double>> initiators[] = {
      {{0.98, 0.58}, {0.58, 0.05}},
      {{0.99, 0.53}, {0.53, 0.13}},
  };
  for (const auto& k : initiators) {
    const AffinityMatrix m(2, {k[0][0], k[0][1], k[1][0], k[1][1]});
    for (std::size_t l = 1; l <= 4; ++l) {
      const auto [config, attrs] = kronecker_to_mag(m, l);
      CHECK(config.n() == (std::size_t{1} << l));
      const auto oracle_matrix = oracle::kronecker_power(k, l);
      double worst = 0.0;
      for (std::size_t u = 0; u < config.n(); ++u)
        for (std::size_t v = 0; v < config.n(); ++v)
          worst = std::max(worst, std::abs(edge_probability(attrs.row(u), attrs.row(v), config) -
                                           oracle_matrix[u][v]));
      CHECK(worst <= 1e-12);
    }
  }
}

TEST_CASE("kronecker_to_mag examples and capacity") {
  const AffinityMatrix k(2, {0.98, 0.58, 0.58, 0.05});
  const auto [config, attrs] = kronecker_to_mag(k, 2);
  CHECK(edge_probability(attrs.row(0), attrs.row(3), config) == doctest::Approx(0.3364).epsilon(1e-14));
  const auto [c1, a1] = kronecker_to_mag(k, 1);
  CHECK(edge_probability(a1.row(1), a1.row(1), c1) == 0.05);
  CHECK_THROWS_AS(kronecker_to_mag(k, 40), Error);
  CHECK_THROWS_AS(kronecker_to_mag(k, 0), Error);
}

TEST_CASE("attribute text format round-trips bit-exactly") {
  const auto a = sample_attributes(MagConfig::simplified(37, 11, 0.3, kWeakCore), 8);
  std::stringstream s;
  write_attributes(s, a);
  const std::string first = s.str();
  const auto b = read_attributes(s);
  CHECK(a == b);
  std::stringstream again;
  write_attributes(again, b);
  CHECK(again.str() == first);
}

TEST_CASE("attribute reader reports the failing line") {
  std::stringstream bad("2 3\n0 1 0\n0 1\n");
  try {
    read_attributes(bad);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIo);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("assignment validation against config") {
  const auto c = MagConfig::simplified(2, 2, 0.5, kWeakCore);
  CHECK_NOTHROW(AttributeAssignment(2, 2, bits({0, 1, 1, 0})).validate_against(c));
  CHECK_THROWS_AS(AttributeAssignment(2, 2, bits({0, 2, 1, 0})).validate_against(c), Error);
  CHECK_THROWS_AS(AttributeAssignment(3, 2, bits({0, 1, 1, 0, 0, 0})).validate_against(c), Error);
}

TEST_CASE("stream uniform and geometric skip") {
  Stream s(1, stream_tag::kAttributes, 0);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    CHECK_UNARY(u > 0.0 && u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / 100000.0 - 0.5) < 4 * std::sqrt(1.0 / 12.0 / 100000.0));

  const double p = 0.1;
  double skips = 0.0;
  for (int i = 0; i < 100000; ++i) skips += static_cast<double>(s.geometric_skip(p));
  const double mean = (1 - p) / p, sd = std::sqrt((1 - p) / (p * p));
  CHECK(std::abs(skips / 100000.0 - mean) < 4 * sd / std::sqrt(100000.0));
  CHECK(s.geometric_skip(1.0) == 0);
  CHECK(s.geometric_skip(0.0) == Stream::max());
}
