#include "magnet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "magnet/error.hpp"
#include "magnet/parallel.hpp"
#include "magnet/theory.hpp"

namespace magnet {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

TrialSummary summarize(std::span<const double> values, std::size_t successes) {
  require(!values.empty(), ErrorKind::kInsufficientData, "no trials to summarize");
  require(successes <= values.size(), ErrorKind::kOutOfRange, "more successes than trials");
  TrialSummary out;
  out.seeds = values.size();
  out.successes = successes;
  const double count = static_cast<double>(values.size());
  out.mean = pairwise_sum(values) / count;
  if (values.size() > 1) {
    std::vector<double> squares(values.size());
    std::transform(values.begin(), values.end(), squares.begin(),
                   [&](double v) { return (v - out.mean) * (v - out.mean); });
    const double variance = pairwise_sum(squares) / (count - 1.0);
    out.std_error = std::sqrt(variance / count);
  }
  return out;
}

FitResult polynomial_fit(std::span<const double> x, std::span<const double> y, std::size_t degree) {
  require(x.size() == y.size(), ErrorKind::kInvalidAssignment, "x and y lengths differ");
  const std::size_t terms = degree + 1;
  require(x.size() >= terms, ErrorKind::kInsufficientData,
          "need at least " + std::to_string(terms) + " points for the fit");
  const auto rows = static_cast<Eigen::Index>(x.size());
  const auto cols = static_cast<Eigen::Index>(terms);
  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd target(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    double power = 1.0;
    for (Eigen::Index j = cols - 1; j >= 0; --j) {
      design(i, j) = power;
      power *= x[static_cast<std::size_t>(i)];
    }
    target(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(target);
  const Eigen::VectorXd residual = target - design * coef;
  FitResult out;
  out.coefficients.assign(coef.data(), coef.data() + coef.size());
  out.n_points = x.size();
  out.residual_norm = residual.norm();
  const double total = (target.array() - target.mean()).square().sum();
  const double explained = total > 0.0 ? 1.0 - residual.squaredNorm() / total : 1.0;
  out.r_squared = std::clamp(explained, 0.0, 1.0);
  return out;
}

std::vector<Point> log_binned_density(const DegreeDistribution& dist, std::size_t raw_below,
                                      double min_mass) {
  std::vector<Point> points;
  std::size_t lo = 0, hi = 0;
  double mass = 0.0;
  auto flush = [&] {
    if (lo > 0 && mass > 0.0 && mass >= min_mass) {
      const double width = static_cast<double>(hi - lo);
      const double center = hi - lo == 1 ? static_cast<double>(lo)
                                         : std::sqrt(static_cast<double>(lo) * static_cast<double>(hi));
      points.emplace_back(center, mass / width);
    }
    mass = 0.0;
  };
  auto bin_of = [&](std::size_t k) -> std::pair<std::size_t, std::size_t> {
    if (k < raw_below || k == 0) return {k, k + 1};
    std::size_t start = std::max<std::size_t>(raw_below, 1);
    while (2 * start <= k) start *= 2;
    return {start, 2 * start};
  };
  bool open = false;
  for (const auto& [k, p] : dist.pdf) {
    const auto [b_lo, b_hi] = bin_of(k);
    if (!open || b_lo != lo) {
      if (open) flush();
      lo = b_lo;
      hi = b_hi;
      open = true;
    }
    mass += p;
  }
  if (open) flush();
  return points;
}

std::size_t median_degree(const DegreeDistribution& dist) {
  require(!dist.pdf.empty(), ErrorKind::kInsufficientData, "empty distribution");
  double cumulative = 0.0;
  for (const auto& [k, p] : dist.pdf) {
    cumulative += p;
    if (cumulative >= 0.5) return k;
  }
  return dist.pdf.rbegin()->first;
}

QuadraticFit fit_loglog_quadratic(const DegreeDistribution& dist, double tail_cutoff,
                                  double min_mass) {
  std::size_t distinct = 0;
  for (const auto& [k, p] : dist.pdf)
    if (k > 0 && static_cast<double>(k) >= tail_cutoff && p > 0.0) ++distinct;
  require(distinct >= 8, ErrorKind::kInsufficientData,
          "need at least 8 distinct degrees above the tail cutoff");
  std::vector<double> x, y;
  for (const auto& [k, p] : log_binned_density(dist, 32, min_mass)) {
    if (k < tail_cutoff) continue;
    x.push_back(std::log(k));
    y.push_back(std::log(p));
  }
  require(x.size() >= 3, ErrorKind::kInsufficientData, "need at least 3 binned tail points");
  QuadraticFit out{polynomial_fit(x, y, 2), 0.0, 0.0};
  const double a = out.fit.coefficients[0], b = out.fit.coefficients[1];
  require(a < 0.0, ErrorKind::kNumerical, "tail is not concave in log-log scale");
  out.implied_variance = -1.0 / (2.0 * a);
  out.implied_mean = (b + 1.0) * out.implied_variance;
  return out;
}

FitResult fit_loglog_linear(std::span<const Point> points, double k_min, double k_max) {
  std::vector<double> x, y;
  for (const auto& [k, v] : points) {
    if (k < k_min || k > k_max || k <= 0.0 || !(v > 0.0)) continue;
    x.push_back(std::log(k));
    y.push_back(std::log(v));
  }
  require(x.size() >= 8, ErrorKind::kInsufficientData, "need at least 8 points for the slope fit");
  return polynomial_fit(x, y, 1);
}

EdgeCountComparison compare_edge_counts(const MagConfig& config,
                                        std::span<const std::uint64_t> seeds,
                                        GenerationMethod method, unsigned threads) {
  require(seeds.size() >= 10, ErrorKind::kInsufficientData, "need at least 10 seeds");
  std::vector<double> counts(seeds.size());
  parallel_for(seeds.size(), threads, [&](std::size_t i) {
    counts[i] = static_cast<double>(generate(config, seeds[i], method).graph.num_edges());
  });
  EdgeCountComparison out{summarize(counts), expected_edges(config), 0.0};
  const double diff = out.summary.mean - out.expected;
  if (out.summary.std_error > 0.0) {
    out.z = diff / out.summary.std_error;
  } else if (diff != 0.0) {
    out.z = std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  return out;
}

const char* to_string(ScanProperty property) {
  switch (property) {
    case ScanProperty::kGiant: return "giant";
    case ScanProperty::kConnected: return "connected";
    case ScanProperty::kDiameter: return "diameter";
  }
  return "unknown";
}

double analytic_value(const MagConfig& config, ScanProperty property) {
  switch (property) {
    case ScanProperty::kGiant: return giant_component_criterion(config).value;
    case ScanProperty::kConnected: return connectivity_criterion(config).value;
    case ScanProperty::kDiameter: return diameter_criterion(config).value;
  }
  return 0.0;
}

ThresholdScan threshold_scan(const ConfigFamily& family, std::span<const double> values,
                             ScanProperty property, std::span<const std::uint64_t> seeds,
                             const ScanOptions& options) {
  require(!values.empty() && !seeds.empty(), ErrorKind::kInsufficientData,
          "scan needs sweep values and seeds");
  std::vector<MagConfig> configs;
  configs.reserve(values.size());
  for (double v : values) configs.push_back(family(v));

  const std::size_t per_point = seeds.size();
  std::vector<double> measured(values.size() * per_point);
  std::vector<std::uint8_t> success(measured.size());
  parallel_for(measured.size(), options.threads, [&](std::size_t task) {
    const auto& config = configs[task / per_point];
    const auto graph = generate(config, seeds[task % per_point]).graph;
    const double n = static_cast<double>(graph.n());
    if (property == ScanProperty::kDiameter) {
      double diameter = std::numeric_limits<double>::infinity();
      if (graph.num_edges() > 0) {
        try {
          diameter = effective_diameter(graph, 0.9, options.bfs);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::kUndefined) throw;
        }
      }
      measured[task] = diameter;
      success[task] = diameter <= options.diameter_bound;
    } else {
      const auto sizes = connected_components(graph);
      measured[task] = static_cast<double>(sizes.front()) / n;
      success[task] = property == ScanProperty::kGiant
                          ? 2 * sizes.front() >= graph.n()
                          : sizes.size() == 1;
    }
  });

  std::vector<ScanPoint> points;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::span<const double> chunk(measured.data() + i * per_point, per_point);
    const auto hits = static_cast<std::size_t>(
        std::count(success.begin() + static_cast<std::ptrdiff_t>(i * per_point),
                   success.begin() + static_cast<std::ptrdiff_t>((i + 1) * per_point), 1));
    points.push_back({values[i], summarize(chunk, hits), analytic_value(configs[i], property)});
  }
  return assemble_scan(std::move(points), options.monotone_slack);
}

ThresholdScan assemble_scan(std::vector<ScanPoint> points, double monotone_slack) {
  ThresholdScan scan;
  scan.points = std::move(points);
  auto fraction = [&](const ScanPoint& p) {
    return static_cast<double>(p.summary.successes) / static_cast<double>(p.summary.seeds);
  };
  for (std::size_t i = 1; i < scan.points.size(); ++i)
    if (fraction(scan.points[i]) < fraction(scan.points[i - 1]) - monotone_slack) ++scan.violations;
  const std::size_t pairs = scan.points.size() > 1 ? scan.points.size() - 1 : 1;
  scan.monotone = static_cast<double>(scan.violations) <= 0.05 * static_cast<double>(pairs);
  if (scan.monotone) {
    for (const auto& p : scan.points) {
      if (fraction(p) >= 0.5) {
        scan.crossing = p.value;
        break;
      }
    }
  }
  return scan;
}

double analytic_crossing(const ConfigFamily& family, ScanProperty property, double lo, double hi) {
  auto excess = [&](double v) { return analytic_value(family(v), property) - 0.5; };
  double f_lo = excess(lo);
  const double f_hi = excess(hi);
  require((f_lo < 0.0) != (f_hi < 0.0), ErrorKind::kNumerical,
          "analytic criterion does not cross 1/2 on the interval");
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = excess(mid);
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  const std::size_t size = std::max(p.size(), q.size());
  std::vector<double> diffs(size);
  for (std::size_t k = 0; k < size; ++k) {
    const double a = k < p.size() ? p[k] : 0.0;
    const double b = k < q.size() ? q[k] : 0.0;
    diffs[k] = std::abs(a - b);
  }
  return std::min(1.0, 0.5 * pairwise_sum(diffs));
}

namespace {

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorKind::kInvalidAssignment, "x and y lengths differ");
  require(x.size() >= 2, ErrorKind::kInsufficientData, "need at least 2 points");
  const auto rx = average_ranks(x), ry = average_ranks(y);
  const double count = static_cast<double>(x.size());
  const double mx = pairwise_sum(rx) / count, my = pairwise_sum(ry) / count;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  require(sxx > 0.0 && syy > 0.0, ErrorKind::kUndefined, "rank correlation of a constant input");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace magnet
