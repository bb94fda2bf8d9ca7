#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "magnet/core.hpp"
#include "magnet/generate.hpp"
#include "magnet/metrics.hpp"

namespace magnet {

struct FitResult {
  std::vector<double> coefficients;  // highest power first
  double r_squared = 0.0;
  std::size_t n_points = 0;
  double residual_norm = 0.0;
};

struct TrialSummary {
  std::size_t seeds = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t successes = 0;
};

using Point = std::pair<double, double>;

// Sum with pairwise reduction; the result depends only on the input order.
double pairwise_sum(std::span<const double> values);

// Mean and standard error (sample deviation / sqrt(count)).
TrialSummary summarize(std::span<const double> values, std::size_t successes = 0);

// Least-squares polynomial fit of y on x.
FitResult polynomial_fit(std::span<const double> x, std::span<const double> y, std::size_t degree);

// Density points (k, p): one per degree below raw_below, then one per
// power-of-two bin [2^j, 2^(j+1)) with mass averaged over the bin width and
// placed at the bin's geometric center. Degree 0 and bins with mass below
// min_mass are dropped.
std::vector<Point> log_binned_density(const DegreeDistribution& dist, std::size_t raw_below = 32,
                                      double min_mass = 0.0);

// Median of the degree distribution: smallest k with cumulative mass >= 1/2.
std::size_t median_degree(const DegreeDistribution& dist);

struct QuadraticFit {
  FitResult fit;            // ln p = a (ln k)^2 + b ln k + c
  double implied_mean;      // completed square with the -ln k density term
  double implied_variance;  // -1 / (2a)
};

// Fits log-binned density points whose center is >= tail_cutoff. Requires
// at least 8 distinct degrees >= tail_cutoff with nonzero mass and at least
// three binned points.
QuadraticFit fit_loglog_quadratic(const DegreeDistribution& dist, double tail_cutoff,
                                  double min_mass = 0.0);

// ln y = slope * ln k + intercept over points with k_min <= k <= k_max and
// y > 0; coefficients are {slope, intercept}. Requires at least 8 points.
FitResult fit_loglog_linear(std::span<const Point> points, double k_min,
                            double k_max = std::numeric_limits<double>::infinity());

struct EdgeCountComparison {
  TrialSummary summary;
  double expected;
  double z;
};

// Generates one graph per seed and compares the mean edge count to the
// closed form. Requires at least 10 seeds.
EdgeCountComparison compare_edge_counts(const MagConfig& config, std::span<const std::uint64_t> seeds,
                                        GenerationMethod method = GenerationMethod::kBucketed,
                                        unsigned threads = 1);

enum class ScanProperty { kGiant, kConnected, kDiameter };

const char* to_string(ScanProperty property);

// Analytic criterion value for the property.
double analytic_value(const MagConfig& config, ScanProperty property);

using ConfigFamily = std::function<MagConfig(double)>;

struct ScanOptions {
  unsigned threads = 1;
  double diameter_bound = 10.0;
  BfsMode bfs = SampledBfs{};
  // Tolerated drop in success fraction between adjacent points.
  double monotone_slack = 0.1;
};

struct ScanPoint {
  double value;
  TrialSummary summary;  // mean of the measured scalar, successes of the predicate
  double analytic;
};

struct ThresholdScan {
  std::vector<ScanPoint> points;
  bool monotone = true;
  std::size_t violations = 0;
  std::optional<double> crossing;  // first value with success fraction >= 1/2
};

// Fills monotone, violations and crossing from the points' success counts.
ThresholdScan assemble_scan(std::vector<ScanPoint> points, double monotone_slack = 0.1);

// Measured scalar: largest component fraction (giant, connected) or
// effective diameter (diameter). Predicates: largest >= n/2, one component,
// effective diameter <= bound.
ThresholdScan threshold_scan(const ConfigFamily& family, std::span<const double> values,
                             ScanProperty property, std::span<const std::uint64_t> seeds,
                             const ScanOptions& options = {});

// Sweep value in [lo, hi] where the analytic criterion equals 1/2, by
// bisection. Requires a sign change on the interval.
double analytic_crossing(const ConfigFamily& family, ScanProperty property, double lo, double hi);

// 1/2 sum |p_k - q_k|, shorter input padded with zeros.
double tv_distance(std::span<const double> p, std::span<const double> q);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace magnet
