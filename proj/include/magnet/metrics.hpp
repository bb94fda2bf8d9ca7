#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "magnet/generate.hpp"

namespace magnet {

struct DegreeDistribution {
  std::map<std::size_t, double> pdf;   // degree -> fraction of nodes
  std::map<std::size_t, double> ccdf;  // degree -> fraction with degree >= k

  static DegreeDistribution from_degrees(std::span<const std::size_t> degrees);
  // Counts indexed by degree; entries with zero count are skipped.
  static DegreeDistribution from_counts(std::span<const double> counts);
};

DegreeDistribution degree_distribution(const Graph& graph);

struct HopPlot {
  // (h, ordered pairs including self at distance <= h), h = 0..max_h.
  std::vector<std::pair<std::size_t, std::uint64_t>> points;
};

// Component sizes, descending.
std::vector<std::size_t> connected_components(const Graph& graph);

struct ExactBfs {};
struct SampledBfs {
  std::size_t sources = 256;
  std::uint64_t seed = 0;
};
using BfsMode = std::variant<ExactBfs, SampledBfs>;

// Number of connected ordered pairs (u != v) at each distance d >= 1 from the
// selected BFS sources; index 0 is unused.
std::vector<std::uint64_t> distance_histogram(const Graph& graph, const BfsMode& mode = ExactBfs{},
                                              unsigned threads = 1);

// Effective diameter from a distance histogram: the hop count at which the
// cumulative pair fraction first exceeds the percentile, linearly
// interpolated, and 1 when the first hop already exceeds it.
double effective_diameter(std::span<const std::uint64_t> histogram, double percentile);

double effective_diameter(const Graph& graph, double percentile = 0.9,
                          const BfsMode& mode = ExactBfs{}, unsigned threads = 1);

HopPlot hop_plot(const Graph& graph, std::size_t max_h, unsigned threads = 1);

// Triangles through each node, self-edges ignored.
std::vector<std::uint64_t> triangles_per_node(const Graph& graph);

// Degree (self-edges excluded) -> mean local clustering coefficient.
std::map<std::size_t, double> clustering_by_degree(const Graph& graph);

// Triangle count -> number of nodes.
std::map<std::uint64_t, std::size_t> triad_participation(const Graph& graph);

struct SingularSpectrum {
  std::vector<double> values;           // descending
  std::vector<double> leading_vector;   // |u_1| components, descending
  std::vector<double> residuals;        // ||A v - sigma u|| per value
  std::size_t iterations = 0;
};

// Top-k singular triples of the adjacency matrix by block subspace iteration
// with Rayleigh-Ritz extraction. Throws kNumerical with the best residual
// when max_iter is exhausted.
SingularSpectrum top_singular(const Graph& graph, std::size_t k, double tol = 1e-8,
                              std::size_t max_iter = 2000, std::uint64_t seed = 0,
                              unsigned threads = 1);

// Two-column CSV: a single '#' header line carrying the metric name and any
// extra key=value fields, then "x,y" rows.
struct CsvHeader {
  std::string metric;
  std::vector<std::pair<std::string, std::string>> fields;
};
void write_xy_csv(std::ostream& out, const CsvHeader& header,
                  std::span<const std::pair<double, double>> rows);

}  // namespace magnet
