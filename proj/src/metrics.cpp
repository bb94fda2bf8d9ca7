#include "magnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include <Eigen/Dense>

#include "magnet/error.hpp"
#include "magnet/parallel.hpp"
#include "magnet/rng.hpp"

namespace magnet {

DegreeDistribution DegreeDistribution::from_degrees(std::span<const std::size_t> degrees) {
  require(!degrees.empty(), ErrorKind::kInsufficientData, "degree sequence is empty");
  std::map<std::size_t, std::size_t> counts;
  for (auto d : degrees) ++counts[d];
  DegreeDistribution out;
  const double total = static_cast<double>(degrees.size());
  std::size_t at_least = degrees.size();
  for (const auto& [degree, count] : counts) {
    out.pdf[degree] = static_cast<double>(count) / total;
    out.ccdf[degree] = static_cast<double>(at_least) / total;
    at_least -= count;
  }
  return out;
}

DegreeDistribution DegreeDistribution::from_counts(std::span<const double> counts) {
  double total = 0.0;
  for (double c : counts) {
    require(c >= 0.0 && std::isfinite(c), ErrorKind::kOutOfRange, "counts must be nonnegative");
    total += c;
  }
  require(total > 0.0, ErrorKind::kInsufficientData, "counts sum to zero");
  DegreeDistribution out;
  for (std::size_t k = 0; k < counts.size(); ++k)
    if (counts[k] > 0.0) out.pdf[k] = counts[k] / total;
  double tail = 0.0;
  for (auto it = out.pdf.rbegin(); it != out.pdf.rend(); ++it) {
    tail += it->second;
    out.ccdf[it->first] = tail;
  }
  if (!out.ccdf.empty()) out.ccdf.begin()->second = 1.0;
  return out;
}

DegreeDistribution degree_distribution(const Graph& graph) {
  const auto degrees = degree_sequence(graph);
  return DegreeDistribution::from_degrees(degrees);
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }
  std::size_t size_of_root(std::size_t r) const { return size_[r]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

// Reusable BFS scratch space; distances are reset only where they were set.
class BfsScratch {
 public:
  explicit BfsScratch(std::size_t n) : dist_(n, kUnreached) { queue_.reserve(n); }

  // Adds the number of nodes at each distance >= 1 from source to counts.
  void run(const Adjacency& adj, std::size_t source, std::vector<std::uint64_t>& counts) {
    queue_.clear();
    queue_.push_back(static_cast<NodeId>(source));
    dist_[source] = 0;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const NodeId u = queue_[head];
      const std::uint32_t next = dist_[u] + 1;
      for (NodeId w : adj.neighbors(u)) {
        if (dist_[w] != kUnreached) continue;
        dist_[w] = next;
        queue_.push_back(w);
        if (counts.size() <= next) counts.resize(next + 1, 0);
        ++counts[next];
      }
    }
    for (NodeId u : queue_) dist_[u] = kUnreached;
  }

 private:
  std::vector<std::uint32_t> dist_;
  std::vector<NodeId> queue_;
};

std::vector<std::size_t> select_sources(const Graph& graph, const BfsMode& mode) {
  const std::size_t n = graph.n();
  std::vector<std::size_t> sources(n);
  std::iota(sources.begin(), sources.end(), std::size_t{0});
  if (const auto* sampled = std::get_if<SampledBfs>(&mode)) {
    require(sampled->sources >= 1, ErrorKind::kOutOfRange, "need at least one BFS source");
    if (sampled->sources < n) {
      Stream stream(sampled->seed, stream_tag::kSources);
      for (std::size_t i = 0; i < sampled->sources; ++i)
        std::swap(sources[i], sources[i + stream.below(n - i)]);
      sources.resize(sampled->sources);
      std::sort(sources.begin(), sources.end());
    }
  }
  return sources;
}

// Per-distance node counts summed over BFS runs from each source.
std::vector<std::uint64_t> bfs_counts(const Graph& graph, std::span<const std::size_t> sources,
                                      unsigned threads) {
  const auto& adj = graph.adjacency();
  constexpr std::size_t kChunk = 64;
  const std::size_t chunks = (sources.size() + kChunk - 1) / kChunk;
  std::vector<std::vector<std::uint64_t>> partial(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    BfsScratch scratch(graph.n());
    const std::size_t end = std::min(sources.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) scratch.run(adj, sources[i], partial[c]);
  });
  std::vector<std::uint64_t> total(1, 0);
  for (const auto& p : partial) {
    if (total.size() < p.size()) total.resize(p.size(), 0);
    for (std::size_t d = 0; d < p.size(); ++d) total[d] += p[d];
  }
  return total;
}

}  // namespace

std::vector<std::size_t> connected_components(const Graph& graph) {
  DisjointSets sets(graph.n());
  for (const auto& e : graph.edges()) sets.unite(e.u, e.v);
  std::vector<std::size_t> sizes;
  for (std::size_t u = 0; u < graph.n(); ++u)
    if (sets.find(u) == u) sizes.push_back(sets.size_of_root(u));
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  return sizes;
}

std::vector<std::uint64_t> distance_histogram(const Graph& graph, const BfsMode& mode,
                                              unsigned threads) {
  const auto sources = select_sources(graph, mode);
  return bfs_counts(graph, sources, threads);
}

double effective_diameter(std::span<const std::uint64_t> histogram, double percentile) {
  require(percentile > 0.0 && percentile < 1.0, ErrorKind::kOutOfRange,
          "percentile must be in (0,1)");
  std::vector<double> cumulative(histogram.size(), 0.0);
  double running = 0.0;
  for (std::size_t d = 1; d < histogram.size(); ++d) {
    running += static_cast<double>(histogram[d]);
    cumulative[d] = running;
  }
  require(running > 0.0, ErrorKind::kUndefined, "no connected pairs; distance undefined");
  const double target = percentile * running;
  std::size_t d = 1;
  while (d < cumulative.size() && !(cumulative[d] > target)) ++d;
  if (d >= cumulative.size()) return static_cast<double>(cumulative.size() - 1);
  if (d == 1) return 1.0;
  const double step = cumulative[d] - cumulative[d - 1];
  return static_cast<double>(d - 1) + (target - cumulative[d - 1]) / step;
}

double effective_diameter(const Graph& graph, double percentile, const BfsMode& mode,
                          unsigned threads) {
  require(percentile > 0.0 && percentile < 1.0, ErrorKind::kOutOfRange,
          "percentile must be in (0,1)");
  const auto histogram = distance_histogram(graph, mode, threads);
  return effective_diameter(histogram, percentile);
}

HopPlot hop_plot(const Graph& graph, std::size_t max_h, unsigned threads) {
  std::vector<std::size_t> all(graph.n());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto counts = bfs_counts(graph, all, threads);
  HopPlot plot;
  std::uint64_t reachable = graph.n();
  for (std::size_t h = 0; h <= max_h; ++h) {
    if (h >= 1 && h < counts.size()) reachable += counts[h];
    plot.points.emplace_back(h, reachable);
  }
  return plot;
}

std::vector<std::uint64_t> triangles_per_node(const Graph& graph) {
  const auto& adj = graph.adjacency();
  const std::size_t n = graph.n();
  // Orient each edge toward the endpoint of higher (degree, id) rank.
  auto before = [&](std::size_t a, std::size_t b) {
    const auto da = adj.neighbors(a).size(), db = adj.neighbors(b).size();
    return da != db ? da < db : a < b;
  };
  std::vector<std::vector<NodeId>> out(n);
  for (std::size_t u = 0; u < n; ++u)
    for (NodeId w : adj.neighbors(u))
      if (before(u, w)) out[u].push_back(w);
  std::vector<std::uint64_t> triangles(n, 0);
  std::vector<std::uint8_t> mark(n, 0);
  for (std::size_t u = 0; u < n; ++u) {
    for (NodeId v : out[u]) mark[v] = 1;
    for (NodeId v : out[u]) {
      for (NodeId w : out[v]) {
        if (!mark[w]) continue;
        ++triangles[u];
        ++triangles[v];
        ++triangles[w];
      }
    }
    for (NodeId v : out[u]) mark[v] = 0;
  }
  return triangles;
}

std::map<std::size_t, double> clustering_by_degree(const Graph& graph) {
  const auto& adj = graph.adjacency();
  const auto triangles = triangles_per_node(graph);
  std::map<std::size_t, std::pair<double, std::size_t>> sums;
  for (std::size_t u = 0; u < graph.n(); ++u) {
    const std::size_t d = adj.neighbors(u).size();
    const double wedges = static_cast<double>(d) * static_cast<double>(d - 1) / 2.0;
    const double local = d < 2 ? 0.0 : static_cast<double>(triangles[u]) / wedges;
    auto& [sum, count] = sums[d];
    sum += local;
    ++count;
  }
  std::map<std::size_t, double> out;
  for (const auto& [d, s] : sums) out[d] = s.first / static_cast<double>(s.second);
  return out;
}

std::map<std::uint64_t, std::size_t> triad_participation(const Graph& graph) {
  std::map<std::uint64_t, std::size_t> out;
  for (auto t : triangles_per_node(graph)) ++out[t];
  return out;
}

namespace {

using Block = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// W = A * V using adjacency lists; a self-edge is a unit diagonal entry.
void multiply(const Adjacency& adj, const Block& v, Block& w, unsigned threads) {
  const std::size_t n = adj.n();
  constexpr std::size_t kRows = 256;
  parallel_for((n + kRows - 1) / kRows, threads, [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * kRows);
    for (std::size_t u = c * kRows; u < end; ++u) {
      auto row = w.row(static_cast<Eigen::Index>(u));
      if (adj.has_self_edge(u)) {
        row = v.row(static_cast<Eigen::Index>(u));
      } else {
        row.setZero();
      }
      for (NodeId x : adj.neighbors(u)) row += v.row(x);
    }
  });
}

Block orthonormalize(const Block& v) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
  return qr.householderQ() * Eigen::MatrixXd::Identity(v.rows(), v.cols());
}

}  // namespace

SingularSpectrum top_singular(const Graph& graph, std::size_t k, double tol, std::size_t max_iter,
                              std::uint64_t seed, unsigned threads) {
  const std::size_t n = graph.n();
  require(k >= 1 && k <= n, ErrorKind::kOutOfRange, "k must be in [1, n]");
  require(tol > 0.0, ErrorKind::kOutOfRange, "tol must be positive");
  const auto& adj = graph.adjacency();
  const auto b = static_cast<Eigen::Index>(std::min(n, k + 8));
  const auto rows = static_cast<Eigen::Index>(n);

  Block v(rows, b);
  Stream stream(seed, stream_tag::kSpectral);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < b; ++j) v(i, j) = stream.uniform() - 0.5;
  v = orthonormalize(v);

  Block w(rows, b);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    multiply(adj, v, w, threads);
    Eigen::MatrixXd h = v.transpose() * w;
    h = 0.5 * (h + h.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(b));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) {
      return std::abs(eig.eigenvalues()(x)) > std::abs(eig.eigenvalues()(y));
    });

    const Block ritz = v * eig.eigenvectors();
    const Block image = w * eig.eigenvectors();
    const double scale = std::abs(eig.eigenvalues()(order[0]));
    SingularSpectrum out;
    out.iterations = iter;
    double worst_ratio = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const auto col = order[j];
      const double theta = eig.eigenvalues()(col);
      const double sigma = std::abs(theta);
      const double residual = (image.col(col) - theta * ritz.col(col)).norm();
      // Values at rounding level of the largest are checked against it.
      const double floor = std::max(sigma, scale * 1e-12);
      worst_ratio = std::max(worst_ratio, floor > 0.0 ? residual / floor : residual);
      out.values.push_back(sigma);
      out.residuals.push_back(residual);
    }
    best = std::min(best, worst_ratio);
    if (worst_ratio <= tol || (scale == 0.0 && worst_ratio == 0.0)) {
      const auto lead = ritz.col(order[0]);
      out.leading_vector.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        out.leading_vector[i] = std::abs(lead(static_cast<Eigen::Index>(i)));
      std::sort(out.leading_vector.begin(), out.leading_vector.end(), std::greater<>());
      return out;
    }
    v = orthonormalize(image);
  }
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "subspace iteration did not converge in %zu iterations (best relative "
                "residual %.3g)",
                max_iter, best);
  fail(ErrorKind::kNumerical, buf);
}

void write_xy_csv(std::ostream& out, const CsvHeader& header,
                  std::span<const std::pair<double, double>> rows) {
  out << "# metric=" << header.metric;
  for (const auto& [key, value] : header.fields) out << ' ' << key << '=' << value;
  out << '\n';
  char buf[64];
  for (const auto& [x, y] : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x, y);
    out << buf;
  }
}

}  // namespace magnet
