#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "magnet/error.hpp"

namespace magnet {

using NodeId = std::uint32_t;
using AttributeValue = std::uint16_t;

// Square matrix of link affinities for one attribute. Entries are stored
// row-major and must lie strictly inside (0, 1).
class AffinityMatrix {
 public:
  AffinityMatrix(std::size_t dim, std::vector<double> entries);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t row, std::size_t col) const noexcept {
    return entries_[row * dim_ + col];
  }
  std::span<const double> entries() const noexcept { return entries_; }
  bool symmetric() const noexcept { return symmetric_; }

 private:
  std::size_t dim_;
  std::vector<double> entries_;
  bool symmetric_;
};

// The 2x2 symmetric affinity [alpha beta; beta gamma].
class SimplifiedTheta {
 public:
  // Throws kInvalidConfig unless every entry is in (0,1), and, when
  // require_core_periphery is set, unless gamma < beta < alpha.
  static SimplifiedTheta make(double alpha, double beta, double gamma,
                              bool require_core_periphery = false);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double gamma() const noexcept { return gamma_; }
  bool core_periphery() const noexcept {
    return gamma_ < beta_ && beta_ < alpha_;
  }
  AffinityMatrix matrix() const;
  // Entry selected by two binary values.
  double at(AttributeValue a, AttributeValue b) const noexcept {
    return a == 0 ? (b == 0 ? alpha_ : beta_) : (b == 0 ? beta_ : gamma_);
  }

  friend bool operator==(const SimplifiedTheta&, const SimplifiedTheta&) = default;

 private:
  SimplifiedTheta(double a, double b, double g) : alpha_(a), beta_(b), gamma_(g) {}
  double alpha_, beta_, gamma_;
};

struct SimplifiedModel {
  double mu;  // P(value 0) for every attribute
  SimplifiedTheta theta;
};

struct CategoricalAttribute {
  std::vector<double> probs;  // distribution over categories
  AffinityMatrix affinity;
};

struct GeneralModel {
  std::vector<CategoricalAttribute> attributes;
};

struct PowerLawModel {
  std::vector<double> mus;  // per-attribute P(value 0)
  std::vector<SimplifiedTheta> thetas;
};

using Model = std::variant<SimplifiedModel, GeneralModel, PowerLawModel>;

// One binary attribute: P(value 0) and its affinity.
struct BinaryAttribute {
  double mu;
  SimplifiedTheta theta;
};

class MagConfig {
 public:
  static MagConfig simplified(std::size_t n, std::size_t l, double mu,
                              SimplifiedTheta theta, bool self_edges = false);
  static MagConfig general(std::size_t n, std::vector<CategoricalAttribute> attributes,
                           bool self_edges = false);
  static MagConfig power_law(std::size_t n, std::vector<double> mus,
                             std::vector<SimplifiedTheta> thetas, bool self_edges = false);

  std::size_t n() const noexcept { return n_; }
  std::size_t l() const noexcept { return l_; }
  bool self_edges() const noexcept { return self_edges_; }
  const Model& model() const noexcept { return model_; }

  const SimplifiedModel* simplified_model() const noexcept {
    return std::get_if<SimplifiedModel>(&model_);
  }
  // Throws kInvalidConfig when the variant is not Simplified.
  const SimplifiedModel& require_simplified() const;

  // l / log2(n); requires n >= 2.
  double rho() const;

  // True for the Simplified and PowerLaw variants (and General configs whose
  // attributes are all 2x2 symmetric).
  bool binary() const noexcept;
  // Per-attribute view of a binary config; throws kInvalidConfig otherwise.
  std::vector<BinaryAttribute> binary_attributes() const;

  std::size_t dim(std::size_t attribute) const;
  double affinity(std::size_t attribute, AttributeValue a, AttributeValue b) const;
  bool all_symmetric() const noexcept;

  MagConfig with_n(std::size_t n) const;
  MagConfig with_l(std::size_t l) const;
  MagConfig with_self_edges(bool enabled) const;

 private:
  MagConfig(std::size_t n, std::size_t l, Model model, bool self_edges);
  void validate() const;

  std::size_t n_;
  std::size_t l_;
  Model model_;
  bool self_edges_;
};

// Node-by-attribute table of category indices. Binary tables additionally
// keep packed bit rows (bit set = value 1) for word-parallel counting.
class AttributeAssignment {
 public:
  AttributeAssignment(std::size_t n, std::size_t l, std::vector<AttributeValue> values);

  std::size_t n() const noexcept { return n_; }
  std::size_t l() const noexcept { return l_; }
  bool binary() const noexcept { return binary_; }

  std::span<const AttributeValue> row(std::size_t node) const noexcept {
    return {values_.data() + node * l_, l_};
  }
  AttributeValue value(std::size_t node, std::size_t attribute) const noexcept {
    return values_[node * l_ + attribute];
  }
  std::span<const AttributeValue> values() const noexcept { return values_; }

  std::size_t words_per_row() const noexcept { return words_; }
  // Only meaningful when binary().
  std::span<const std::uint64_t> packed_row(std::size_t node) const noexcept {
    return {packed_.data() + node * words_, words_};
  }

  // Throws kInvalidAssignment if the shape or any category index does not
  // fit the config.
  void validate_against(const MagConfig& config) const;

  friend bool operator==(const AttributeAssignment& a, const AttributeAssignment& b) {
    return a.n_ == b.n_ && a.l_ == b.l_ && a.values_ == b.values_;
  }

 private:
  std::size_t n_;
  std::size_t l_;
  std::vector<AttributeValue> values_;
  bool binary_;
  std::size_t words_;
  std::vector<std::uint64_t> packed_;
};

struct SharedCounts {
  std::size_t both_zero = 0;
  std::size_t both_one = 0;
  friend bool operator==(const SharedCounts&, const SharedCounts&) = default;
};

// Independent draw of every a_i(u); deterministic in (config, seed) and
// independent of evaluation order.
AttributeAssignment sample_attributes(const MagConfig& config, std::uint64_t seed);

// Product over attributes of the selected affinity entries. Evaluated in log
// space when l > 32.
double edge_probability(std::span<const AttributeValue> u, std::span<const AttributeValue> v,
                        const MagConfig& config);

SharedCounts shared_counts(std::span<const AttributeValue> u, std::span<const AttributeValue> v);
SharedCounts shared_counts_packed(std::span<const std::uint64_t> u,
                                  std::span<const std::uint64_t> v, std::size_t l) noexcept;

// Number of zeros in a binary row.
std::size_t node_weight(std::span<const AttributeValue> row);

// Builds the MAG equivalent of a Kronecker graph: n = 2^l nodes, every
// attribute uses the initiator, and node u's attributes are its l-bit binary
// id (most significant bit first).
std::pair<MagConfig, AttributeAssignment> kronecker_to_mag(const AffinityMatrix& initiator,
                                                           std::size_t l);

// Text format: "n l" header, then one row per node of space-separated values.
void write_attributes(std::ostream& out, const AttributeAssignment& attributes);
AttributeAssignment read_attributes(std::istream& in);

}  // namespace magnet
