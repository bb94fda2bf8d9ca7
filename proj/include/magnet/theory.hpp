#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "magnet/core.hpp"

namespace magnet {

// Per-attribute expectations used throughout the closed forms.
//   x      = mu*alpha + (1-mu)*beta      (partner average for a 0-valued attribute)
//   y      = mu*beta  + (1-mu)*gamma     (partner average for a 1-valued attribute)
//   zeta   = mu*x + (1-mu)*y             (average pair affinity)
//   ratio  = x / y
//   lambda = mu*beta / y                 (core weight fraction of the diameter argument)
struct AffinitySummary {
  double x;
  double y;
  double zeta;
  double ratio;
  double lambda;

  static AffinitySummary of(double mu, const SimplifiedTheta& theta);
};

enum class Verdict { kHolds, kFails, kBoundary };

const char* to_string(Verdict verdict);

// Values within this distance of 1/2 are reported as kBoundary.
inline constexpr double kBoundaryTolerance = 1e-9;

struct CriterionResult {
  double value;
  Verdict verdict;
};

struct ConnectivityResult {
  double value;               // F_c
  std::optional<double> nu;   // present iff (1-mu)^rho < 1/2
  Verdict verdict;
};

struct DiameterResult {
  double value;  // y^rho
  Verdict verdict;
  double lambda;
};

struct LognormalParams {
  double mean;
  double variance;
  std::vector<std::string> warnings;  // assumption band violations
};

// Expected edge count: n(n-1)/2 * prod(zeta_i) plus n * prod(mu_i alpha_i +
// (1-mu_i) gamma_i) when self-edges are enabled. Simplified and power-law
// configs.
double expected_edges(const MagConfig& config);

// x^i y^(l-i): edge probability to a random partner given weight i.
double expected_edge_prob_given_weight(const MagConfig& config, std::size_t weight);

// (n-1) x^i y^(l-i), plus 2 alpha^i gamma^(l-i) with self-edges.
double expected_degree_given_weight(const MagConfig& config, std::size_t weight);

// 2 + rho * log2(zeta).
double densification_exponent(const MagConfig& config);

// [x^mu y^(1-mu)]^rho; holds iff >= 1/2.
CriterionResult giant_component_criterion(const MagConfig& config);

// Value of [(mu/nu)^nu ((1-mu)/(1-nu))^(1-nu)]^rho.
double nu_equation(double mu, double rho, double nu);

// Root of nu_equation(mu, rho, nu) = 1/2 on (0, mu), by bisection. Requires
// (1-mu)^rho < 1/2.
double solve_nu(double mu, double rho);

ConnectivityResult connectivity_criterion(const MagConfig& config);

DiameterResult diameter_criterion(const MagConfig& config);

LognormalParams lognormal_params(const MagConfig& config);

// Exact degree pmf p_0..p_kmax of the simplified model without self-edges,
// a binomial mixture over node weight evaluated in log space.
std::vector<double> theoretical_degree_pmf(const MagConfig& config, std::size_t k_max);

// Solves mu/(1-mu) = R(mu)^(-delta) for one core-periphery theta.
double solve_powerlaw_mu(const SimplifiedTheta& theta, double delta);

// Residual |mu/(1-mu) - R(mu)^(-delta)|.
double powerlaw_condition_residual(double mu, const SimplifiedTheta& theta, double delta);

// Power-law config whose per-attribute mu satisfy the power-law condition.
MagConfig solve_powerlaw_config(std::size_t n, std::span<const SimplifiedTheta> thetas,
                                double delta, bool self_edges = false);

// Thetas whose ratios are R_i = (1+z)^(2^i), i = 0..l-1, so the 2^l expected
// degree levels are spaced by exactly 1+z. Every attribute gets the same x_i,
// with prod x_i = top_edge_probability; beta is centered in its feasible range.
std::vector<SimplifiedTheta> geometric_level_thetas(std::size_t l, double z, double delta,
                                                    double top_edge_probability);

// (n-1) * prod over attributes of x_i (value 0) or y_i (value 1).
double powerlaw_expected_degree(const MagConfig& config, std::span<const AttributeValue> row);

// prod over attributes of mu_i (value 0) or 1-mu_i (value 1).
double powerlaw_vector_probability(const MagConfig& config, std::span<const AttributeValue> row);

struct TheoryReport {
  std::size_t n;
  std::size_t l;
  double rho;
  double mu;
  double alpha;
  double beta;
  double gamma;
  bool self_edges;
  AffinitySummary summary;
  double expected_edges;
  double densification_exponent;
  double giant_criterion;
  double connectivity_value;
  std::optional<double> nu;
  double diameter_criterion;
  double lognormal_mean;
  double lognormal_variance;
  Verdict giant_verdict;
  Verdict connected_verdict;
  Verdict diameter_verdict;
  std::vector<std::string> warnings;
};

TheoryReport theory_report(const MagConfig& config);

// Flat key=value block, one quantity per line, reals with 17 significant
// digits. Warnings follow as "warning=<text>" lines.
void write_theory_report(std::ostream& out, const TheoryReport& report);

}  // namespace magnet
