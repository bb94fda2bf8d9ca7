#include "magnet/generate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <string_view>

#include "magnet/parallel.hpp"
#include "magnet/rng.hpp"

namespace magnet {

Adjacency::Adjacency(std::size_t n, std::span<const Edge> edges)
    : offsets_(n + 1, 0), self_(n, 0) {
  for (const Edge& e : edges) {
    if (e.u == e.v) {
      self_[e.u] = 1;
    } else {
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
  }
  for (std::size_t u = 0; u < n; ++u) offsets_[u + 1] += offsets_[u];
  targets_.resize(offsets_[n]);
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  // Edges are sorted, so each neighbor list comes out ascending.
  for (const Edge& e : edges) {
    if (e.u == e.v) continue;
    targets_[cursor[e.u]++] = e.v;
  }
  for (const Edge& e : edges) {
    if (e.u == e.v) continue;
    targets_[cursor[e.v]++] = e.u;
  }
  for (std::size_t u = 0; u < n; ++u)
    std::sort(targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[u]),
              targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[u + 1]));
}

struct Graph::Cache {
  std::once_flag once;
  std::unique_ptr<Adjacency> adjacency;
};

Graph::Graph(std::size_t n, std::vector<Edge> edges, bool self_edges_allowed)
    : n_(n), edges_(std::move(edges)), self_edges_allowed_(self_edges_allowed),
      cache_(std::make_shared<Cache>()) {
  for (Edge& e : edges_) {
    if (e.u > e.v) std::swap(e.u, e.v);
    require(e.v < n_, ErrorKind::kInvalidAssignment, "edge endpoint out of range");
    require(self_edges_allowed_ || e.u != e.v, ErrorKind::kInvalidAssignment,
            "self-edge in a graph without self-edges");
  }
  std::sort(edges_.begin(), edges_.end());
  require(std::adjacent_find(edges_.begin(), edges_.end()) == edges_.end(),
          ErrorKind::kInvalidAssignment, "duplicate edge");
}

const Adjacency& Graph::adjacency() const {
  std::call_once(cache_->once, [this] {
    cache_->adjacency = std::make_unique<Adjacency>(n_, edges_);
  });
  return *cache_->adjacency;
}

BucketIndex::BucketIndex(const AttributeAssignment& attributes) {
  std::map<std::vector<AttributeValue>, std::vector<NodeId>> groups;
  for (std::size_t u = 0; u < attributes.n(); ++u) {
    const auto row = attributes.row(u);
    groups[std::vector<AttributeValue>(row.begin(), row.end())].push_back(
        static_cast<NodeId>(u));
  }
  buckets_.reserve(groups.size());
  for (auto& [key, nodes] : groups) buckets_.push_back(Bucket{key, std::move(nodes)});
}

namespace {

void check_inputs(const MagConfig& config, const AttributeAssignment& attributes,
                  const GenerateOptions& options) {
  require(config.n() * config.l() <= options.max_attribute_cells, ErrorKind::kCapacity,
          "n*l exceeds the configured memory budget");
  attributes.validate_against(config);
}

// Edge probability for two nodes, specialized for the simplified model where
// it only depends on the shared counts.
class PairProbability {
 public:
  PairProbability(const MagConfig& config, const AttributeAssignment& attributes)
      : config_(config), attributes_(attributes), l_(config.l()) {
    if (const auto* s = config.simplified_model(); s != nullptr && attributes.binary()) {
      table_.resize((l_ + 1) * (l_ + 1), 0.0);
      std::vector<AttributeValue> u(l_), v(l_);
      for (std::size_t zeros = 0; zeros <= l_; ++zeros) {
        for (std::size_t ones = 0; zeros + ones <= l_; ++ones) {
          // Rows realizing these counts; evaluated by the reference kernel so
          // both paths share arithmetic.
          for (std::size_t i = 0; i < l_; ++i) {
            u[i] = i < zeros ? 0 : 1;
            v[i] = i < zeros ? 0 : (i < zeros + ones ? 1 : 0);
          }
          table_[zeros * (l_ + 1) + ones] = edge_probability(u, v, config);
        }
      }
    }
  }

  double operator()(std::size_t u, std::size_t v) const {
    if (!table_.empty()) {
      const SharedCounts c =
          shared_counts_packed(attributes_.packed_row(u), attributes_.packed_row(v), l_);
      return table_[c.both_zero * (l_ + 1) + c.both_one];
    }
    return edge_probability(attributes_.row(u), attributes_.row(v), config_);
  }

 private:
  const MagConfig& config_;
  const AttributeAssignment& attributes_;
  std::size_t l_;
  std::vector<double> table_;
};

Graph merge(std::size_t n, std::vector<std::vector<Edge>>& parts, bool self_edges) {
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<Edge> edges;
  edges.reserve(total);
  for (auto& p : parts) {
    edges.insert(edges.end(), p.begin(), p.end());
    std::vector<Edge>().swap(p);
  }
  return Graph(n, std::move(edges), self_edges);
}

constexpr std::size_t kRowBlock = 64;

}  // namespace

Graph generate_naive(const MagConfig& config, const AttributeAssignment& attributes,
                     std::uint64_t seed, const GenerateOptions& options) {
  check_inputs(config, attributes, options);
  const std::size_t n = config.n();
  const bool self = config.self_edges();
  const PairProbability probability(config, attributes);
  const std::size_t blocks = (n + kRowBlock - 1) / kRowBlock;
  std::vector<std::vector<Edge>> parts(blocks);
  parallel_for(blocks, options.threads, [&](std::size_t block) {
    auto& out = parts[block];
    const std::size_t end = std::min(n, (block + 1) * kRowBlock);
    for (std::size_t u = block * kRowBlock; u < end; ++u) {
      Stream rng(seed, stream_tag::kNaiveRow, u);
      for (std::size_t v = self ? u : u + 1; v < n; ++v) {
        if (rng.uniform() < probability(u, v))
          out.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
      }
    }
  });
  return merge(n, parts, self);
}

Graph generate_bucketed(const MagConfig& config, const AttributeAssignment& attributes,
                        std::uint64_t seed, const GenerateOptions& options) {
  check_inputs(config, attributes, options);
  const bool self = config.self_edges();
  const BucketIndex index(attributes);
  const auto buckets = index.buckets();
  const std::size_t count = buckets.size();
  std::vector<std::vector<Edge>> parts(count);

  parallel_for(count, options.threads, [&](std::size_t a) {
    auto& out = parts[a];
    const auto& nodes_a = buckets[a].nodes;
    for (std::size_t b = a; b < count; ++b) {
      const auto& nodes_b = buckets[b].nodes;
      const double p = edge_probability(buckets[a].key, buckets[b].key, config);
      Stream rng(seed, stream_tag::kBucketPair, a * count + b);
      const std::uint64_t size_a = nodes_a.size(), size_b = nodes_b.size();
      std::uint64_t total = 0;
      if (a != b) {
        total = size_a * size_b;
      } else {
        total = self ? size_a * (size_a + 1) / 2 : size_a * (size_a - 1) / 2;
      }
      std::uint64_t idx = 0;
      while (idx < total) {
        const std::uint64_t skip = rng.geometric_skip(p);
        if (skip >= total - idx) break;
        idx += skip;
        NodeId u, v;
        if (a != b) {
          u = nodes_a[idx / size_b];
          v = nodes_b[idx % size_b];
        } else {
          // Row-major lower triangle: row i holds i entries (i+1 with the
          // diagonal when self-edges are sampled).
          const double fi = self ? (std::sqrt(8.0 * static_cast<double>(idx) + 1.0) - 1.0) / 2.0
                                 : (std::sqrt(8.0 * static_cast<double>(idx) + 1.0) + 1.0) / 2.0;
          std::uint64_t i = static_cast<std::uint64_t>(fi);
          auto row_start = [self](std::uint64_t r) {
            return self ? r * (r + 1) / 2 : r * (r - 1) / 2;
          };
          while (row_start(i) > idx) --i;
          while (row_start(i + 1) <= idx) ++i;
          const std::uint64_t j = idx - row_start(i);
          u = nodes_a[j];
          v = nodes_a[i];
        }
        out.push_back(u < v ? Edge{u, v} : Edge{v, u});
        ++idx;
      }
    }
  });
  return merge(config.n(), parts, self);
}

GeneratedGraph generate(const MagConfig& config, std::uint64_t seed, GenerationMethod method,
                        const GenerateOptions& options) {
  require(config.n() * config.l() <= options.max_attribute_cells, ErrorKind::kCapacity,
          "n*l exceeds the configured memory budget");
  AttributeAssignment attributes = sample_attributes(config, seed);
  Graph graph = method == GenerationMethod::kNaive
                    ? generate_naive(config, attributes, seed, options)
                    : generate_bucketed(config, attributes, seed, options);
  return GeneratedGraph{std::move(attributes), std::move(graph)};
}

std::vector<std::size_t> degree_sequence(const Graph& graph) {
  std::vector<std::size_t> degrees(graph.n(), 0);
  for (const Edge& e : graph.edges()) {
    ++degrees[e.u];
    ++degrees[e.v];
  }
  return degrees;
}

void write_edge_list(std::ostream& out, const Graph& graph) {
  out << "# nodes " << graph.n() << '\n'
      << "# self_edges " << (graph.self_edges_allowed() ? 1 : 0) << '\n';
  std::string buffer;
  buffer.reserve(1 << 16);
  char tmp[24];
  for (const Edge& e : graph.edges()) {
    auto r = std::to_chars(tmp, tmp + sizeof tmp, e.u);
    buffer.append(tmp, r.ptr);
    buffer.push_back('\t');
    r = std::to_chars(tmp, tmp + sizeof tmp, e.v);
    buffer.append(tmp, r.ptr);
    buffer.push_back('\n');
    if (buffer.size() > (1 << 16) - 64) {
      out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
      buffer.clear();
    }
  }
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  long long nodes = -1;
  int self = -1;
  std::vector<Edge> edges;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto parse_tail = [&](std::string_view key, long long& value) {
        if (line.compare(0, key.size(), key) != 0) return false;
        const char* begin = line.data() + key.size();
        auto [ptr, ec] = std::from_chars(begin, line.data() + line.size(), value);
        require(ec == std::errc() && ptr == line.data() + line.size(), ErrorKind::kIo,
                "edge list line " + std::to_string(line_no) + ": malformed header");
        return true;
      };
      long long value = 0;
      if (parse_tail("# nodes ", value)) {
        nodes = value;
      } else if (parse_tail("# self_edges ", value)) {
        require(value == 0 || value == 1, ErrorKind::kIo, "edge list: self_edges must be 0 or 1");
        self = static_cast<int>(value);
      }
      continue;
    }
    const auto tab = line.find('\t');
    require(tab != std::string::npos, ErrorKind::kIo,
            "edge list line " + std::to_string(line_no) + ": expected u<TAB>v");
    unsigned long long u = 0, v = 0;
    auto r1 = std::from_chars(line.data(), line.data() + tab, u);
    auto r2 = std::from_chars(line.data() + tab + 1, line.data() + line.size(), v);
    require(r1.ec == std::errc() && r1.ptr == line.data() + tab && r2.ec == std::errc() &&
                r2.ptr == line.data() + line.size(),
            ErrorKind::kIo, "edge list line " + std::to_string(line_no) + ": bad node id");
    require(u <= std::numeric_limits<NodeId>::max() && v <= std::numeric_limits<NodeId>::max(),
            ErrorKind::kIo, "edge list line " + std::to_string(line_no) + ": node id too large");
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
  }
  require(nodes >= 0, ErrorKind::kIo, "edge list: missing \"# nodes <n>\"");
  require(self >= 0, ErrorKind::kIo, "edge list: missing \"# self_edges <0|1>\"");
  return Graph(static_cast<std::size_t>(nodes), std::move(edges), self == 1);
}

}  // namespace magnet
