#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "../unit/oracles.hpp"
#include "magnet/generate.hpp"
#include "magnet/metrics.hpp"
#include "magnet/parallel.hpp"
#include "magnet/rng.hpp"
#include "magnet/stats.hpp"
#include "magnet/theory.hpp"

using namespace magnet;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
  std::vector<std::uint64_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = first + i;
  return out;
}

unsigned g_jobs = 1;

const SimplifiedTheta kStrongCore = SimplifiedTheta::make(0.85, 0.7, 0.15);
const SimplifiedTheta kWeakCore = SimplifiedTheta::make(0.85, 0.30, 0.25);
constexpr double kRho = 0.596;

std::size_t l_for(std::size_t n, double rho) {
  return static_cast<std::size_t>(std::floor(rho * std::log2(static_cast<double>(n)) + 0.5));
}

MagConfig strong_core(std::size_t n) { return MagConfig::simplified(n, l_for(n, kRho), 0.5, kStrongCore); }

Outcome kronecker_equivalence() {
  const auto start = Clock::now();
  const std::vector<oracle::Matrix> initiators{{{0.98, 0.58}, {0.58, 0.05}}, {{0.99, 0.53}, {0.53, 0.13}}};
  double worst = 0.0;
  for (const auto& k : initiators) {
    const AffinityMatrix initiator(2, {k[0][0], k[0][1], k[1][0], k[1][1]});
    for (std::size_t l = 1; l <= 4; ++l) {
      const auto [config, attributes] = kronecker_to_mag(initiator, l);
      const auto reference = oracle::kronecker_power(k, l);
      for (std::size_t u = 0; u < config.n(); ++u)
        for (std::size_t v = 0; v < config.n(); ++v)
          worst = std::max(worst, std::abs(edge_probability(attributes.row(u), attributes.row(v), config) -
                                           reference[u][v]));
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-12 && elapsed < 1.0,
          fmt("max |P_mag - P_kron| = %.3g (tol 1e-12), %.3f s (limit 1 s)", worst, elapsed)};
}

Outcome edge_count_law() {
  const auto start = Clock::now();
  const std::vector<MagConfig> configs{
      MagConfig::simplified(1024, 8, 0.3, kStrongCore),  MagConfig::simplified(1024, 8, 0.45, kWeakCore),
      MagConfig::simplified(1024, 8, 0.5, kStrongCore),  MagConfig::simplified(1024, 8, 0.7, kStrongCore),
      MagConfig::simplified(1024, 8, 1.0, kWeakCore),
  };
  const auto seeds = seed_range(1, 30);
  double worst = 0.0;
  std::string zs;
  for (const auto method : {GenerationMethod::kNaive, GenerationMethod::kBucketed}) {
    for (const auto& c : configs) {
      const auto r = compare_edge_counts(c, seeds, method, g_jobs);
      worst = std::max(worst, std::abs(r.z));
      zs += fmt("%s%+.2f", zs.empty() ? "" : " ", r.z);
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= 3.0 && elapsed < 120.0,
          fmt("max |z| = %.3f (limit 3) over naive+bucketed [%s], %.1f s (limit 120 s)", worst, zs.c_str(),
              elapsed)};
}

// Sum over all 2^l partner vectors of P(v) * prod Theta[u_j, v_j].
double enumerate_conditional(std::size_t l, std::size_t weight, double mu, const SimplifiedTheta& t) {
  double total = 0.0;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << l); ++v) {
    double p = 1.0, edge = 1.0;
    for (std::size_t j = 0; j < l; ++j) {
      const int vj = static_cast<int>((v >> j) & 1U);
      const int uj = j < weight ? 0 : 1;
      p *= vj == 0 ? mu : 1.0 - mu;
      edge *= uj == 0 ? (vj == 0 ? t.alpha() : t.beta()) : (vj == 0 ? t.beta() : t.gamma());
    }
    total += p * edge;
  }
  return total;
}

Outcome conditional_probability_oracle() {
  const std::vector<std::pair<double, SimplifiedTheta>> cases{
      {0.5, kStrongCore}, {0.45, kWeakCore}, {0.2, SimplifiedTheta::make(0.9, 0.6, 0.2)},
      {0.8, SimplifiedTheta::make(0.3, 0.7, 0.5)}};
  double worst = 0.0;
  std::size_t checks = 0;
  for (const auto& [mu, theta] : cases) {
    for (std::size_t l = 1; l <= 12; ++l) {
      const auto c = MagConfig::simplified(100, l, mu, theta);
      for (std::size_t w = 0; w <= l; ++w) {
        worst = std::max(worst, std::abs(expected_edge_prob_given_weight(c, w) - enumerate_conditional(l, w, mu, theta)));
        ++checks;
      }
    }
  }
  return {worst <= 1e-12, fmt("max abs difference %.3g over %zu (l, weight, config) cases (tol 1e-12)", worst, checks)};
}

Outcome degree_pmf_oracle() {
  const auto start = Clock::now();
  const auto c = MagConfig::simplified(512, 6, 0.5, kStrongCore);
  const std::size_t seeds = 200;
  std::vector<std::vector<double>> per_seed(seeds, std::vector<double>(c.n(), 0.0));
  parallel_for(seeds, g_jobs, [&](std::size_t s) {
    for (auto d : degree_sequence(generate(c, 1 + s).graph)) per_seed[s][d] += 1.0;
  });
  std::vector<double> empirical(c.n(), 0.0);
  for (const auto& h : per_seed)
    for (std::size_t k = 0; k < h.size(); ++k) empirical[k] += h[k] / static_cast<double>(seeds * c.n());
  const double tv = tv_distance(empirical, theoretical_degree_pmf(c, c.n() - 1));
  const double elapsed = seconds_since(start);
  return {tv < 0.02 && elapsed < 180.0, fmt("TV = %.4f (limit 0.02), %.1f s (limit 180 s)", tv, elapsed)};
}

Outcome giant_threshold() {
  const std::size_t n = 4096;
  const std::size_t l = l_for(n, kRho);
  const ConfigFamily family = [&](double f) {
    return MagConfig::simplified(n, l, 0.5, SimplifiedTheta::make(0.85 * f, 0.7 * f, 0.15 * f));
  };
  std::vector<double> values;
  for (int i = 0; i <= 35; ++i) values.push_back(0.3 + 0.02 * i);
  ScanOptions options;
  options.threads = g_jobs;
  const auto scan = threshold_scan(family, values, ScanProperty::kGiant, seed_range(1, 20), options);
  const double analytic = analytic_crossing(family, ScanProperty::kGiant, values.front(), values.back());
  if (!scan.crossing)
    return {false, fmt("no monotone empirical crossing (violations %zu); analytic f = %.4f", scan.violations, analytic)};
  const double gap = std::abs(*scan.crossing - analytic);
  return {gap <= 0.02 + 1e-9, fmt("empirical f = %.2f, analytic f = %.4f, gap %.4f (limit one step 0.02), l=%zu",
                                  *scan.crossing, analytic, gap, l)};
}

Outcome connectivity() {
  const auto seeds = seed_range(1, 20);
  auto fraction_connected = [&](const MagConfig& c) {
    std::vector<std::uint8_t> connected(seeds.size());
    parallel_for(seeds.size(), g_jobs, [&](std::size_t i) {
      connected[i] = connected_components(generate(c, seeds[i]).graph).size() == 1;
    });
    return static_cast<double>(std::count(connected.begin(), connected.end(), 1)) / static_cast<double>(seeds.size());
  };
  const auto dense = strong_core(16384);
  // Strong-core affinities scaled by one half.
  const auto sparse = MagConfig::simplified(16384, dense.l(), 0.5, SimplifiedTheta::make(0.425, 0.35, 0.075));
  const double fc_dense = connectivity_criterion(dense).value;
  const double fc_sparse = connectivity_criterion(sparse).value;
  const double yes = fraction_connected(dense);
  const double no = 1.0 - fraction_connected(sparse);
  return {fc_dense > 0.5 && fc_sparse <= 0.42 && yes >= 0.95 && no >= 0.95,
          fmt("F_c = %.4f connected in %.0f%%; F_c = %.4f disconnected in %.0f%% (limit 95%% each)", fc_dense,
              100 * yes, fc_sparse, 100 * no)};
}

Outcome constant_diameter() {
  const std::vector<std::size_t> sizes{4096, 8192, 16384};
  const auto seeds = seed_range(1, 10);
  std::vector<double> d(sizes.size() * seeds.size());
  parallel_for(d.size(), g_jobs, [&](std::size_t task) {
    const auto c = strong_core(sizes[task / seeds.size()]);
    const auto seed = seeds[task % seeds.size()];
    d[task] = effective_diameter(generate(c, seed).graph, 0.9, SampledBfs{1024, seed});
  });
  const double worst = *std::max_element(d.begin(), d.end());
  std::size_t nonincreasing = 0;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    bool ok = true;
    for (std::size_t i = 1; i < sizes.size(); ++i) ok &= d[i * seeds.size() + s] <= d[(i - 1) * seeds.size() + s];
    nonincreasing += ok;
  }
  const double fraction = static_cast<double>(nonincreasing) / static_cast<double>(seeds.size());
  std::string means;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    double m = 0.0;
    for (std::size_t s = 0; s < seeds.size(); ++s) m += d[i * seeds.size() + s] / static_cast<double>(seeds.size());
    means += fmt("%s%zu:%.3f", means.empty() ? "" : " ", sizes[i], m);
  }
  return {worst <= 10.0 && fraction >= 0.9,
          fmt("diameter criterion %.4f; max effective diameter %.3f (limit 10); non-increasing in %.0f%% of seeds "
              "(limit 90%%); means %s",
              diameter_criterion(strong_core(16384)).value, worst, 100 * fraction, means.c_str())};
}

Outcome densification() {
  const auto seeds = seed_range(1, 5);
  std::vector<double> x, y;
  for (int e = 10; e <= 14; ++e) {
    const auto c = strong_core(std::size_t{1} << e);
    std::vector<double> m(seeds.size());
    parallel_for(seeds.size(), g_jobs, [&](std::size_t i) {
      m[i] = static_cast<double>(generate(c, seeds[i]).graph.num_edges());
    });
    x.push_back(std::log(static_cast<double>(c.n())));
    y.push_back(std::log(summarize(m).mean));
  }
  const double slope = polynomial_fit(x, y, 1).coefficients[0];
  const auto s = strong_core(1024).require_simplified();
  const double exponent = 2.0 + kRho * std::log2(AffinitySummary::of(s.mu, s.theta).zeta);
  return {std::abs(slope - exponent) <= 0.1,
          fmt("log-log slope %.4f vs densification exponent %.4f (tol 0.1)", slope, exponent)};
}

Outcome lognormal_tail() {
  const auto c = MagConfig::simplified(4096, 7, 0.5, kStrongCore);
  const auto dist = DegreeDistribution::from_counts(theoretical_degree_pmf(c, c.n() - 1));
  const double median = static_cast<double>(median_degree(dist));
  const auto fit = fit_loglog_quadratic(dist, median, 1e-9);
  const auto predicted = lognormal_params(c);
  const double ratio = fit.implied_variance / predicted.variance;
  return {fit.fit.r_squared >= 0.9 && std::abs(ratio - 1.0) <= 0.25,
          fmt("R^2 = %.5f (limit 0.9) over %zu points above median %.0f; implied variance %.4f vs %.4f (ratio %.3f, "
              "tol 25%%)",
              fit.fit.r_squared, fit.fit.n_points, median, fit.implied_variance, predicted.variance, ratio)};
}

Outcome power_law() {
  const std::size_t n = 16384, l = 12;
  const double delta = 1.0, top_degree = 1000.0;
  // Levels spaced so expected degrees span [1, top_degree].
  const double z = std::expm1(std::log(top_degree) / (std::ldexp(1.0, static_cast<int>(l)) - 1.0));
  const auto thetas = geometric_level_thetas(l, z, delta, top_degree / static_cast<double>(n - 1));
  const auto c = solve_powerlaw_config(n, thetas, delta);
  const auto& model = std::get<PowerLawModel>(c.model());
  double residual = 0.0;
  for (std::size_t i = 0; i < l; ++i)
    residual = std::max(residual, powerlaw_condition_residual(model.mus[i], model.thetas[i], delta));

  const auto seeds = seed_range(1, 20);
  std::vector<std::vector<double>> per_seed(seeds.size(), std::vector<double>(n, 0.0));
  parallel_for(seeds.size(), g_jobs, [&](std::size_t s) {
    for (auto d : degree_sequence(generate(c, seeds[s]).graph)) per_seed[s][d] += 1.0;
  });
  std::vector<double> counts(n, 0.0);
  for (const auto& h : per_seed)
    for (std::size_t k = 0; k < n; ++k) counts[k] += h[k];
  const auto dist = DegreeDistribution::from_counts(counts);
  const auto points = log_binned_density(dist);
  const double k_min = 10.0, k_max = top_degree;
  const auto fit = fit_loglog_linear(points, k_min, k_max);
  const double slope = fit.coefficients[0];
  return {std::abs(slope + 1.5) <= 0.15 && residual <= 1e-10,
          fmt("pdf slope %.4f on k in [%.0f, %.0f] (target -1.5 +- 0.15, R^2 %.4f, %zu points); max condition "
              "residual %.3g (limit 1e-10)",
              slope, k_min, k_max, fit.r_squared, fit.n_points, residual)};
}

Outcome monotonicity() {
  Stream rng(20240917, 0);
  std::size_t violations = 0;
  for (int trial = 0; trial < 1000;) {
    std::array<double, 3> t{rng.uniform(), rng.uniform(), rng.uniform()};
    std::sort(t.begin(), t.end());
    if (!(t[0] < t[1] && t[1] < t[2])) continue;
    ++trial;
    const auto l = 1 + static_cast<std::size_t>(rng.below(20));
    const auto c = MagConfig::simplified(1000, l, rng.uniform(), SimplifiedTheta::make(t[2], t[1], t[0], true));
    for (std::size_t w = 1; w <= l; ++w)
      violations += expected_edge_prob_given_weight(c, w) < expected_edge_prob_given_weight(c, w - 1);
  }
  const auto c = strong_core(8192);
  const auto g = generate(c, 1);
  const auto degrees = degree_sequence(g.graph);
  std::vector<double> sum(c.l() + 1, 0.0), count(c.l() + 1, 0.0);
  for (std::size_t u = 0; u < c.n(); ++u) {
    const auto w = node_weight(g.attributes.row(u));
    sum[w] += static_cast<double>(degrees[u]);
    count[w] += 1.0;
  }
  std::vector<double> weights, means;
  for (std::size_t w = 0; w <= c.l(); ++w) {
    if (count[w] == 0.0) continue;
    weights.push_back(static_cast<double>(w));
    means.push_back(sum[w] / count[w]);
  }
  const double rho = spearman(weights, means);
  return {violations == 0 && rho >= 0.95,
          fmt("%zu monotonicity violations over 1000 fuzzed configs; Spearman(weight, mean degree) = %.4f (limit "
              "0.95) on n=8192",
              violations, rho)};
}

Outcome determinism_performance() {
  const auto c = MagConfig::simplified(10240, 8, 0.45, kWeakCore);
  auto serialize = [](const GeneratedGraph& g) {
    std::ostringstream s;
    write_attributes(s, g.attributes);
    write_edge_list(s, g.graph);
    return s.str();
  };
  const auto start = Clock::now();
  const auto first = generate(c, 42);
  const double elapsed = seconds_since(start);
  const bool same = serialize(first) == serialize(generate(c, 42)) &&
                    serialize(first) == serialize(generate(c, 42, GenerationMethod::kBucketed, {4}));
  return {same && elapsed < 30.0,
          fmt("regeneration %s; bucketed weak-core config (%zu edges) in %.2f s (limit 30 s)",
              same ? "byte-identical" : "DIFFERS", first.graph.num_edges(), elapsed)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "Criterion numbers to run (default all)");
  app.add_option("--jobs", g_jobs, "Worker threads (0 = all cores)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "kronecker-equivalence", kronecker_equivalence},
      {2, "edge-count-law", edge_count_law},
      {3, "conditional-probability-oracle", conditional_probability_oracle},
      {4, "degree-pmf-oracle", degree_pmf_oracle},
      {5, "giant-component-threshold", giant_threshold},
      {6, "connectivity", connectivity},
      {7, "constant-diameter", constant_diameter},
      {8, "densification", densification},
      {9, "lognormal-tail", lognormal_tail},
      {10, "power-law-tail", power_law},
      {11, "monotonicity", monotonicity},
      {12, "determinism-performance", determinism_performance},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
