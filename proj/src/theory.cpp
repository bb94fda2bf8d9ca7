#include "magnet/theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace magnet {

AffinitySummary AffinitySummary::of(double mu, const SimplifiedTheta& theta) {
  AffinitySummary s{};
  s.x = mu * theta.alpha() + (1.0 - mu) * theta.beta();
  s.y = mu * theta.beta() + (1.0 - mu) * theta.gamma();
  s.zeta = mu * mu * theta.alpha() + 2.0 * mu * (1.0 - mu) * theta.beta() +
           (1.0 - mu) * (1.0 - mu) * theta.gamma();
  s.ratio = s.x / s.y;
  s.lambda = mu * theta.beta() / s.y;
  return s;
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kHolds: return "holds";
    case Verdict::kFails: return "fails";
    case Verdict::kBoundary: return "boundary";
  }
  return "unknown";
}

namespace {

Verdict against_half(double value) {
  if (std::abs(value - 0.5) < kBoundaryTolerance) return Verdict::kBoundary;
  return value > 0.5 ? Verdict::kHolds : Verdict::kFails;
}

void check_weight(const MagConfig& config, std::size_t weight) {
  require(weight <= config.l(), ErrorKind::kOutOfRange,
          "weight " + std::to_string(weight) + " exceeds l=" + std::to_string(config.l()));
}

AffinitySummary summary_of(const MagConfig& config) {
  const auto& s = config.require_simplified();
  return AffinitySummary::of(s.mu, s.theta);
}

double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

double expected_edges(const MagConfig& config) {
  require(!std::holds_alternative<GeneralModel>(config.model()), ErrorKind::kInvalidConfig,
          "expected_edges requires a simplified or power-law config");
  const double n = static_cast<double>(config.n());
  double pair = 1.0, self = 1.0;
  for (const auto& a : config.binary_attributes()) {
    const auto s = AffinitySummary::of(a.mu, a.theta);
    pair *= s.zeta;
    self *= a.mu * a.theta.alpha() + (1.0 - a.mu) * a.theta.gamma();
  }
  double edges = n * (n - 1.0) / 2.0 * pair;
  if (config.self_edges()) edges += n * self;
  return edges;
}

double expected_edge_prob_given_weight(const MagConfig& config, std::size_t weight) {
  check_weight(config, weight);
  const auto s = summary_of(config);
  const double i = static_cast<double>(weight), rest = static_cast<double>(config.l() - weight);
  return std::pow(s.x, i) * std::pow(s.y, rest);
}

double expected_degree_given_weight(const MagConfig& config, std::size_t weight) {
  const double pair = expected_edge_prob_given_weight(config, weight);
  double degree = static_cast<double>(config.n() - 1) * pair;
  if (config.self_edges()) {
    const auto& t = config.require_simplified().theta;
    degree += 2.0 * std::pow(t.alpha(), static_cast<double>(weight)) *
              std::pow(t.gamma(), static_cast<double>(config.l() - weight));
  }
  return degree;
}

double densification_exponent(const MagConfig& config) {
  return 2.0 + config.rho() * std::log2(summary_of(config).zeta);
}

CriterionResult giant_component_criterion(const MagConfig& config) {
  const auto& m = config.require_simplified();
  const auto s = AffinitySummary::of(m.mu, m.theta);
  const double value = std::pow(std::pow(s.x, m.mu) * std::pow(s.y, 1.0 - m.mu), config.rho());
  return {value, against_half(value)};
}

double nu_equation(double mu, double rho, double nu) {
  double log_value = 0.0;
  if (nu > 0.0) log_value += nu * std::log(mu / nu);
  if (nu < 1.0) log_value += (1.0 - nu) * std::log((1.0 - mu) / (1.0 - nu));
  return std::exp(rho * log_value);
}

double solve_nu(double mu, double rho) {
  require(mu > 0.0 && mu < 1.0 && rho > 0.0, ErrorKind::kOutOfRange,
          "solve_nu requires mu in (0,1) and rho > 0");
  const double target = std::log(0.5);
  // Log of the criterion; increasing on (0, mu) from rho*ln(1-mu) to 0.
  auto log_criterion = [&](double nu) {
    return rho * (nu * std::log(mu / nu) + (1.0 - nu) * std::log((1.0 - mu) / (1.0 - nu)));
  };
  require(rho * std::log1p(-mu) < target, ErrorKind::kNumerical,
          "nu is only defined when (1-mu)^rho < 1/2");
  double lo = 0.0, hi = mu;
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (log_criterion(mid) < target ? lo : hi) = mid;
  }
  const double nu = 0.5 * (lo + hi);
  const double residual = std::abs(nu_equation(mu, rho, nu) - 0.5);
  require(nu > 0.0 && nu < mu && residual <= 1e-10, ErrorKind::kNumerical,
          "nu bisection did not converge");
  return nu;
}

ConnectivityResult connectivity_criterion(const MagConfig& config) {
  const auto& m = config.require_simplified();
  const auto s = AffinitySummary::of(m.mu, m.theta);
  const double rho = config.rho();
  if (std::pow(1.0 - m.mu, rho) >= 0.5) {
    const double value = std::pow(s.y, rho);
    return {value, std::nullopt, against_half(value)};
  }
  const double nu = solve_nu(m.mu, rho);
  const double value = std::pow(std::pow(s.x, nu) * std::pow(s.y, 1.0 - nu), rho);
  return {value, nu, against_half(value)};
}

DiameterResult diameter_criterion(const MagConfig& config) {
  const auto s = summary_of(config);
  const double value = std::pow(s.y, config.rho());
  return {value, against_half(value), s.lambda};
}

LognormalParams lognormal_params(const MagConfig& config) {
  const auto& m = config.require_simplified();
  const auto s = AffinitySummary::of(m.mu, m.theta);
  const double l = static_cast<double>(config.l()), n = static_cast<double>(config.n());
  const double log_ratio = std::log(s.ratio);
  LognormalParams out{};
  out.variance = l * m.mu * (1.0 - m.mu) * log_ratio * log_ratio;
  out.mean = std::log(n) + l * std::log(s.y) + l * m.mu * log_ratio + out.variance / 2.0;
  if (s.ratio < 1.6 || s.ratio > 3.0) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "ratio x/y = %.4g is outside [1.6, 3]", s.ratio);
    out.warnings.emplace_back(buf);
  }
  if (config.n() >= 2 && giant_component_criterion(config).value < 0.5)
    out.warnings.emplace_back("giant component criterion is below 1/2");
  return out;
}

std::vector<double> theoretical_degree_pmf(const MagConfig& config, std::size_t k_max) {
  const auto& m = config.require_simplified();
  require(!config.self_edges(), ErrorKind::kInvalidConfig,
          "theoretical_degree_pmf assumes self-edges are excluded");
  require(k_max + 1 <= config.n(), ErrorKind::kOutOfRange, "k_max must be at most n-1");
  const auto s = AffinitySummary::of(m.mu, m.theta);
  const std::size_t l = config.l();
  const double trials = static_cast<double>(config.n() - 1);

  // Mixture components with nonzero weight: log weight, log E, log(1-E).
  struct Component {
    double log_weight, log_p, log_q;
  };
  std::vector<Component> components;
  for (std::size_t j = 0; j <= l; ++j) {
    const double jd = static_cast<double>(j), rest = static_cast<double>(l - j);
    if ((m.mu == 0.0 && j > 0) || (m.mu == 1.0 && j < l)) continue;
    double log_weight = log_choose(static_cast<double>(l), jd);
    if (j > 0) log_weight += jd * std::log(m.mu);
    if (j < l) log_weight += rest * std::log1p(-m.mu);
    const double log_p = jd * std::log(s.x) + rest * std::log(s.y);
    components.push_back({log_weight, log_p, std::log1p(-std::exp(log_p))});
  }

  std::vector<double> pmf(k_max + 1);
  std::vector<double> terms(components.size());
  for (std::size_t k = 0; k <= k_max; ++k) {
    const double kd = static_cast<double>(k);
    const double log_binom = log_choose(trials, kd);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < components.size(); ++c) {
      const auto& comp = components[c];
      terms[c] = comp.log_weight + log_binom + kd * comp.log_p + (trials - kd) * comp.log_q;
      peak = std::max(peak, terms[c]);
    }
    if (peak == -std::numeric_limits<double>::infinity()) {
      pmf[k] = 0.0;
      continue;
    }
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - peak);
    pmf[k] = std::exp(peak + std::log(sum));
  }
  return pmf;
}

double powerlaw_condition_residual(double mu, const SimplifiedTheta& theta, double delta) {
  const auto s = AffinitySummary::of(mu, theta);
  return std::abs(mu / (1.0 - mu) - std::pow(s.ratio, -delta));
}

double solve_powerlaw_mu(const SimplifiedTheta& theta, double delta) {
  require(theta.core_periphery(), ErrorKind::kInvalidConfig,
          "power-law solver requires gamma < beta < alpha");
  require(delta > 0.0 && std::isfinite(delta), ErrorKind::kOutOfRange, "delta must be positive");
  // h(mu) = ln(mu/(1-mu)) + delta*ln R(mu) runs from -inf at 0 to +inf at 1.
  auto h = [&](double mu) {
    const auto s = AffinitySummary::of(mu, theta);
    return std::log(mu) - std::log1p(-mu) + delta * std::log(s.ratio);
  };
  // R(mu) is monotone (its derivative has the sign of alpha*gamma - beta^2), so
  // h can only fold back when R decreases; reject ambiguous instances.
  if (theta.alpha() * theta.gamma() < theta.beta() * theta.beta()) {
    int sign_changes = 0;
    double previous = h(0.5 / 4096.0);
    for (int i = 1; i < 4096; ++i) {
      const double current = h((i + 0.5) / 4096.0);
      if ((previous < 0.0) != (current < 0.0)) ++sign_changes;
      previous = current;
    }
    require(sign_changes <= 1, ErrorKind::kNumerical,
            "power-law condition has several roots for this theta");
  }
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  const double mu = 0.5 * (lo + hi);
  require(mu > 0.0 && mu < 1.0 && std::isfinite(h(mu)), ErrorKind::kNumerical,
          "power-law bisection did not converge");
  return mu;
}

MagConfig solve_powerlaw_config(std::size_t n, std::span<const SimplifiedTheta> thetas,
                                double delta, bool self_edges) {
  require(!thetas.empty(), ErrorKind::kInvalidConfig, "need at least one attribute");
  std::vector<double> mus;
  mus.reserve(thetas.size());
  for (const auto& theta : thetas) {
    const double mu = solve_powerlaw_mu(theta, delta);
    require(powerlaw_condition_residual(mu, theta, delta) <= 1e-10, ErrorKind::kNumerical,
            "power-law condition residual above 1e-10");
    mus.push_back(mu);
  }
  return MagConfig::power_law(n, std::move(mus),
                              std::vector<SimplifiedTheta>(thetas.begin(), thetas.end()),
                              self_edges);
}

std::vector<SimplifiedTheta> geometric_level_thetas(std::size_t l, double z, double delta,
                                                    double top_edge_probability) {
  require(l >= 1 && l < 63, ErrorKind::kOutOfRange, "l must be in [1, 62]");
  require(z > 0.0 && delta > 0.0, ErrorKind::kOutOfRange, "z and delta must be positive");
  require(top_edge_probability > 0.0 && top_edge_probability < 1.0, ErrorKind::kOutOfRange,
          "top edge probability must be in (0,1)");
  const double x = std::pow(top_edge_probability, 1.0 / static_cast<double>(l));
  std::vector<SimplifiedTheta> thetas;
  thetas.reserve(l);
  for (std::size_t i = 0; i < l; ++i) {
    const double ratio = std::exp(std::ldexp(std::log1p(z), static_cast<int>(i)));
    const double odds = std::pow(ratio, -delta);
    const double mu = odds / (1.0 + odds);
    const double y = x / ratio;
    const double lo = std::max(y, (x - mu) / (1.0 - mu));
    const double hi = std::min(x, y / mu);
    require(lo < hi && y > 0.0, ErrorKind::kNumerical,
            "no feasible theta for attribute " + std::to_string(i));
    const double beta = 0.5 * (lo + hi);
    const double alpha = (x - (1.0 - mu) * beta) / mu;
    const double gamma = (y - mu * beta) / (1.0 - mu);
    thetas.push_back(SimplifiedTheta::make(alpha, beta, gamma, true));
  }
  return thetas;
}

double powerlaw_expected_degree(const MagConfig& config, std::span<const AttributeValue> row) {
  require(row.size() == config.l(), ErrorKind::kInvalidAssignment, "row length mismatch");
  const auto attrs = config.binary_attributes();
  double product = static_cast<double>(config.n() - 1);
  for (std::size_t i = 0; i < row.size(); ++i) {
    require(row[i] <= 1, ErrorKind::kInvalidAssignment, "row must be binary");
    const auto s = AffinitySummary::of(attrs[i].mu, attrs[i].theta);
    product *= row[i] == 0 ? s.x : s.y;
  }
  return product;
}

double powerlaw_vector_probability(const MagConfig& config,
                                   std::span<const AttributeValue> row) {
  require(row.size() == config.l(), ErrorKind::kInvalidAssignment, "row length mismatch");
  const auto attrs = config.binary_attributes();
  double product = 1.0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    require(row[i] <= 1, ErrorKind::kInvalidAssignment, "row must be binary");
    product *= row[i] == 0 ? attrs[i].mu : 1.0 - attrs[i].mu;
  }
  return product;
}

TheoryReport theory_report(const MagConfig& config) {
  const auto& m = config.require_simplified();
  TheoryReport r{};
  r.n = config.n();
  r.l = config.l();
  r.rho = config.rho();
  r.mu = m.mu;
  r.alpha = m.theta.alpha();
  r.beta = m.theta.beta();
  r.gamma = m.theta.gamma();
  r.self_edges = config.self_edges();
  r.summary = AffinitySummary::of(m.mu, m.theta);
  r.expected_edges = expected_edges(config);
  r.densification_exponent = densification_exponent(config);
  const auto giant = giant_component_criterion(config);
  r.giant_criterion = giant.value;
  r.giant_verdict = giant.verdict;
  const auto conn = connectivity_criterion(config);
  r.connectivity_value = conn.value;
  r.nu = conn.nu;
  r.connected_verdict = conn.verdict;
  const auto diam = diameter_criterion(config);
  r.diameter_criterion = diam.value;
  r.diameter_verdict = diam.verdict;
  const auto ln = lognormal_params(config);
  r.lognormal_mean = ln.mean;
  r.lognormal_variance = ln.variance;
  r.warnings = ln.warnings;
  return r;
}

void write_theory_report(std::ostream& out, const TheoryReport& r) {
  char buf[64];
  auto real = [&](const char* key, double value) {
    std::snprintf(buf, sizeof buf, "%.17g", value);
    out << key << '=' << buf << '\n';
  };
  out << "n=" << r.n << '\n' << "l=" << r.l << '\n';
  real("rho", r.rho);
  real("mu", r.mu);
  real("alpha", r.alpha);
  real("beta", r.beta);
  real("gamma", r.gamma);
  out << "self_edges=" << (r.self_edges ? 1 : 0) << '\n';
  real("x", r.summary.x);
  real("y", r.summary.y);
  real("zeta", r.summary.zeta);
  real("ratio", r.summary.ratio);
  real("lambda", r.summary.lambda);
  real("expected_edges", r.expected_edges);
  real("densification_exponent", r.densification_exponent);
  real("giant_criterion", r.giant_criterion);
  out << "giant_verdict=" << to_string(r.giant_verdict) << '\n';
  real("connectivity_value", r.connectivity_value);
  if (r.nu) {
    real("nu", *r.nu);
  } else {
    out << "nu=none\n";
  }
  out << "connected_verdict=" << to_string(r.connected_verdict) << '\n';
  real("diameter_criterion", r.diameter_criterion);
  out << "diameter_verdict=" << to_string(r.diameter_verdict) << '\n';
  real("lognormal_mean", r.lognormal_mean);
  real("lognormal_variance", r.lognormal_variance);
  for (const auto& w : r.warnings) out << "warning=" << w << '\n';
}

}  // namespace magnet
