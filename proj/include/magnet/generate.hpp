#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "magnet/core.hpp"

namespace magnet {

struct Edge {
  NodeId u;
  NodeId v;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Compressed adjacency of a Graph. Self-edges are kept out of the neighbor
// lists and tracked per node so metrics can ignore them.
class Adjacency {
 public:
  Adjacency(std::size_t n, std::span<const Edge> edges);

  std::size_t n() const noexcept { return offsets_.size() - 1; }
  std::span<const NodeId> neighbors(std::size_t u) const noexcept {
    return {targets_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }
  bool has_self_edge(std::size_t u) const noexcept { return self_[u] != 0; }
  // Degree with a self-edge contributing 2.
  std::size_t degree(std::size_t u) const noexcept {
    return offsets_[u + 1] - offsets_[u] + 2 * std::size_t{self_[u]};
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::vector<std::uint8_t> self_;
};

// Undirected graph stored as a sorted list of pairs with u <= v. Immutable;
// the adjacency view is built on first use and shared between copies.
class Graph {
 public:
  // Normalizes and sorts the pairs. Throws kInvalidAssignment on duplicate
  // edges, endpoints >= n, or self-edges when they are not allowed.
  Graph(std::size_t n, std::vector<Edge> edges, bool self_edges_allowed);

  std::size_t n() const noexcept { return n_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  bool self_edges_allowed() const noexcept { return self_edges_allowed_; }

  const Adjacency& adjacency() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.self_edges_allowed_ == b.self_edges_allowed_ &&
           a.edges_ == b.edges_;
  }

 private:
  struct Cache;
  std::size_t n_;
  std::vector<Edge> edges_;
  bool self_edges_allowed_;
  std::shared_ptr<Cache> cache_;
};

struct Bucket {
  std::vector<AttributeValue> key;  // shared attribute vector
  std::vector<NodeId> nodes;        // ascending
};

// Groups nodes by identical attribute vector, buckets ordered by key.
class BucketIndex {
 public:
  explicit BucketIndex(const AttributeAssignment& attributes);

  std::span<const Bucket> buckets() const noexcept { return buckets_; }
  std::size_t size() const noexcept { return buckets_.size(); }

 private:
  std::vector<Bucket> buckets_;
};

struct GenerateOptions {
  unsigned threads = 1;  // 0 = hardware concurrency
  // Upper bound on n*l attribute cells; larger configs raise kCapacity.
  std::size_t max_attribute_cells = std::size_t{1} << 32;
};

// Visits every unordered pair independently.
Graph generate_naive(const MagConfig& config, const AttributeAssignment& attributes,
                     std::uint64_t seed, const GenerateOptions& options = {});

// Same distribution as generate_naive, but samples each bucket pair's
// implicit pair list by geometric skipping; cost scales with edges drawn.
Graph generate_bucketed(const MagConfig& config, const AttributeAssignment& attributes,
                        std::uint64_t seed, const GenerateOptions& options = {});

enum class GenerationMethod { kNaive, kBucketed };

struct GeneratedGraph {
  AttributeAssignment attributes;
  Graph graph;
};

// Samples attributes and edges from one root seed. Every front end goes
// through this so equal (config, seed) always gives equal output.
GeneratedGraph generate(const MagConfig& config, std::uint64_t seed,
                        GenerationMethod method = GenerationMethod::kBucketed,
                        const GenerateOptions& options = {});

std::vector<std::size_t> degree_sequence(const Graph& graph);

// Edge-list text format: "# nodes <n>", "# self_edges <0|1>", then sorted
// "u<TAB>v" lines.
void write_edge_list(std::ostream& out, const Graph& graph);
Graph read_edge_list(std::istream& in);

}  // namespace magnet
