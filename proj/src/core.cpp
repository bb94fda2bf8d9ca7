#include "magnet/core.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "magnet/rng.hpp"

namespace magnet {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidConfig: return "invalid config";
    case ErrorKind::kInvalidAssignment: return "invalid assignment";
    case ErrorKind::kCapacity: return "capacity";
    case ErrorKind::kNumerical: return "numerical";
    case ErrorKind::kOutOfRange: return "out of range";
    case ErrorKind::kInsufficientData: return "insufficient data";
    case ErrorKind::kUndefined: return "undefined";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

namespace {

bool open_unit(double x) { return x > 0.0 && x < 1.0; }
bool closed_unit(double x) { return x >= 0.0 && x <= 1.0; }

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

AffinityMatrix::AffinityMatrix(std::size_t dim, std::vector<double> entries)
    : dim_(dim), entries_(std::move(entries)), symmetric_(true) {
  require(dim_ >= 1, ErrorKind::kInvalidConfig, "affinity matrix dimension must be positive");
  require(entries_.size() == dim_ * dim_, ErrorKind::kInvalidConfig,
          "affinity matrix needs dim*dim entries");
  for (double e : entries_) {
    require(open_unit(e), ErrorKind::kInvalidConfig,
            "affinity entry " + fmt_double(e) + " outside (0,1)");
  }
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = r + 1; c < dim_; ++c)
      if ((*this)(r, c) != (*this)(c, r)) symmetric_ = false;
}

SimplifiedTheta SimplifiedTheta::make(double alpha, double beta, double gamma,
                                      bool require_core_periphery) {
  require(open_unit(alpha) && open_unit(beta) && open_unit(gamma), ErrorKind::kInvalidConfig,
          "theta entries must lie in (0,1)");
  SimplifiedTheta theta(alpha, beta, gamma);
  if (require_core_periphery) {
    require(theta.core_periphery(), ErrorKind::kInvalidConfig,
            "theta must satisfy gamma < beta < alpha");
  }
  return theta;
}

AffinityMatrix SimplifiedTheta::matrix() const {
  return AffinityMatrix(2, {alpha_, beta_, beta_, gamma_});
}

// ---------------------------------------------------------------------------

MagConfig::MagConfig(std::size_t n, std::size_t l, Model model, bool self_edges)
    : n_(n), l_(l), model_(std::move(model)), self_edges_(self_edges) {
  validate();
}

MagConfig MagConfig::simplified(std::size_t n, std::size_t l, double mu, SimplifiedTheta theta,
                                bool self_edges) {
  return MagConfig(n, l, SimplifiedModel{mu, theta}, self_edges);
}

MagConfig MagConfig::general(std::size_t n, std::vector<CategoricalAttribute> attributes,
                             bool self_edges) {
  const std::size_t l = attributes.size();
  return MagConfig(n, l, GeneralModel{std::move(attributes)}, self_edges);
}

MagConfig MagConfig::power_law(std::size_t n, std::vector<double> mus,
                               std::vector<SimplifiedTheta> thetas, bool self_edges) {
  const std::size_t l = mus.size();
  return MagConfig(n, l, PowerLawModel{std::move(mus), std::move(thetas)}, self_edges);
}

void MagConfig::validate() const {
  require(n_ >= 1, ErrorKind::kInvalidConfig, "n must be positive");
  require(n_ <= std::numeric_limits<NodeId>::max(), ErrorKind::kCapacity,
          "n exceeds node id width");
  require(l_ >= 1, ErrorKind::kInvalidConfig, "l must be positive");
  if (const auto* s = std::get_if<SimplifiedModel>(&model_)) {
    require(closed_unit(s->mu), ErrorKind::kInvalidConfig, "mu must lie in [0,1]");
  } else if (const auto* g = std::get_if<GeneralModel>(&model_)) {
    for (std::size_t i = 0; i < g->attributes.size(); ++i) {
      const auto& attr = g->attributes[i];
      require(attr.probs.size() == attr.affinity.dim(), ErrorKind::kInvalidConfig,
              "attribute " + std::to_string(i) +
                  ": distribution support size differs from affinity dimension");
      require(attr.affinity.dim() <= std::numeric_limits<AttributeValue>::max(),
              ErrorKind::kCapacity, "attribute dimension too large");
      double total = 0.0;
      for (double p : attr.probs) {
        require(closed_unit(p), ErrorKind::kInvalidConfig,
                "attribute " + std::to_string(i) + ": probability outside [0,1]");
        total += p;
      }
      require(std::abs(total - 1.0) <= 1e-9, ErrorKind::kInvalidConfig,
              "attribute " + std::to_string(i) + ": probabilities must sum to 1");
    }
  } else {
    const auto& p = std::get<PowerLawModel>(model_);
    require(p.mus.size() == p.thetas.size(), ErrorKind::kInvalidConfig,
            "power-law config needs one theta per mu");
    for (double mu : p.mus)
      require(closed_unit(mu), ErrorKind::kInvalidConfig, "mu must lie in [0,1]");
  }
}

const SimplifiedModel& MagConfig::require_simplified() const {
  const auto* s = simplified_model();
  require(s != nullptr, ErrorKind::kInvalidConfig, "operation requires a simplified config");
  return *s;
}

double MagConfig::rho() const {
  require(n_ >= 2, ErrorKind::kInvalidConfig, "rho requires n >= 2");
  return static_cast<double>(l_) / std::log2(static_cast<double>(n_));
}

bool MagConfig::binary() const noexcept {
  if (const auto* g = std::get_if<GeneralModel>(&model_)) {
    for (const auto& a : g->attributes)
      if (a.affinity.dim() != 2) return false;
  }
  return true;
}

std::vector<BinaryAttribute> MagConfig::binary_attributes() const {
  std::vector<BinaryAttribute> out;
  out.reserve(l_);
  if (const auto* s = std::get_if<SimplifiedModel>(&model_)) {
    out.assign(l_, BinaryAttribute{s->mu, s->theta});
  } else if (const auto* p = std::get_if<PowerLawModel>(&model_)) {
    for (std::size_t i = 0; i < l_; ++i) out.push_back({p->mus[i], p->thetas[i]});
  } else {
    for (const auto& a : std::get<GeneralModel>(model_).attributes) {
      require(a.affinity.dim() == 2 && a.affinity.symmetric(), ErrorKind::kInvalidConfig,
              "attribute is not a symmetric binary attribute");
      out.push_back({a.probs[0], SimplifiedTheta::make(a.affinity(0, 0), a.affinity(0, 1),
                                                       a.affinity(1, 1))});
    }
  }
  return out;
}

std::size_t MagConfig::dim(std::size_t attribute) const {
  if (const auto* g = std::get_if<GeneralModel>(&model_))
    return g->attributes.at(attribute).affinity.dim();
  return 2;
}

double MagConfig::affinity(std::size_t attribute, AttributeValue a, AttributeValue b) const {
  if (const auto* s = std::get_if<SimplifiedModel>(&model_)) return s->theta.at(a, b);
  if (const auto* p = std::get_if<PowerLawModel>(&model_)) return p->thetas[attribute].at(a, b);
  return std::get<GeneralModel>(model_).attributes[attribute].affinity(a, b);
}

bool MagConfig::all_symmetric() const noexcept {
  if (const auto* g = std::get_if<GeneralModel>(&model_)) {
    for (const auto& a : g->attributes)
      if (!a.affinity.symmetric()) return false;
  }
  return true;
}

MagConfig MagConfig::with_n(std::size_t n) const { return MagConfig(n, l_, model_, self_edges_); }

MagConfig MagConfig::with_l(std::size_t l) const {
  require(simplified_model() != nullptr, ErrorKind::kInvalidConfig,
          "only simplified configs can change l");
  return MagConfig(n_, l, model_, self_edges_);
}

MagConfig MagConfig::with_self_edges(bool enabled) const {
  return MagConfig(n_, l_, model_, enabled);
}

// ---------------------------------------------------------------------------

AttributeAssignment::AttributeAssignment(std::size_t n, std::size_t l,
                                         std::vector<AttributeValue> values)
    : n_(n), l_(l), values_(std::move(values)), binary_(true), words_((l + 63) / 64) {
  require(values_.size() == n_ * l_, ErrorKind::kInvalidAssignment,
          "attribute table must hold n*l values");
  for (AttributeValue v : values_) {
    if (v > 1) {
      binary_ = false;
      break;
    }
  }
  if (binary_) {
    packed_.assign(n_ * words_, 0);
    for (std::size_t u = 0; u < n_; ++u)
      for (std::size_t i = 0; i < l_; ++i)
        if (values_[u * l_ + i] != 0) packed_[u * words_ + i / 64] |= std::uint64_t{1} << (i % 64);
  }
}

void AttributeAssignment::validate_against(const MagConfig& config) const {
  require(n_ == config.n() && l_ == config.l(), ErrorKind::kInvalidAssignment,
          "attribute table shape does not match config");
  if (binary_) return;
  for (std::size_t i = 0; i < l_; ++i) {
    const std::size_t dim = config.dim(i);
    for (std::size_t u = 0; u < n_; ++u)
      require(value(u, i) < dim, ErrorKind::kInvalidAssignment,
              "category index out of range at node " + std::to_string(u));
  }
}

AttributeAssignment sample_attributes(const MagConfig& config, std::uint64_t seed) {
  const std::size_t n = config.n(), l = config.l();
  std::vector<AttributeValue> values(n * l);
  if (config.binary() && !std::holds_alternative<GeneralModel>(config.model())) {
    const auto attrs = config.binary_attributes();
    for (std::size_t u = 0; u < n; ++u) {
      Stream rng(seed, stream_tag::kAttributes, u);
      for (std::size_t i = 0; i < l; ++i)
        values[u * l + i] = rng.uniform() < attrs[i].mu ? 0 : 1;
    }
  } else {
    const auto& attrs = std::get<GeneralModel>(config.model()).attributes;
    for (std::size_t u = 0; u < n; ++u) {
      Stream rng(seed, stream_tag::kAttributes, u);
      for (std::size_t i = 0; i < l; ++i) {
        const auto& probs = attrs[i].probs;
        const double draw = rng.uniform();
        double cumulative = 0.0;
        std::size_t category = probs.size() - 1;
        for (std::size_t c = 0; c < probs.size(); ++c) {
          cumulative += probs[c];
          if (draw < cumulative) {
            category = c;
            break;
          }
        }
        // Trailing zero-probability categories are never selected.
        while (category > 0 && probs[category] == 0.0) --category;
        values[u * l + i] = static_cast<AttributeValue>(category);
      }
    }
  }
  return AttributeAssignment(n, l, std::move(values));
}

double edge_probability(std::span<const AttributeValue> u, std::span<const AttributeValue> v,
                        const MagConfig& config) {
  const std::size_t l = config.l();
  require(u.size() == l && v.size() == l, ErrorKind::kInvalidAssignment,
          "attribute rows must have length l");
  for (std::size_t i = 0; i < l; ++i) {
    const std::size_t dim = config.dim(i);
    require(u[i] < dim && v[i] < dim, ErrorKind::kInvalidAssignment,
            "category index out of range at attribute " + std::to_string(i));
  }
  if (const auto* s = config.simplified_model()) {
    const SharedCounts c = shared_counts(u, v);
    const auto& t = s->theta;
    const double mixed = static_cast<double>(l - c.both_zero - c.both_one);
    const double zeros = static_cast<double>(c.both_zero), ones = static_cast<double>(c.both_one);
    if (l > 32) {
      return std::exp(zeros * std::log(t.alpha()) + mixed * std::log(t.beta()) +
                      ones * std::log(t.gamma()));
    }
    return std::pow(t.alpha(), zeros) * std::pow(t.beta(), mixed) * std::pow(t.gamma(), ones);
  }
  if (l > 32) {
    double log_p = 0.0;
    for (std::size_t i = 0; i < l; ++i) log_p += std::log(config.affinity(i, u[i], v[i]));
    return std::exp(log_p);
  }
  double p = 1.0;
  for (std::size_t i = 0; i < l; ++i) p *= config.affinity(i, u[i], v[i]);
  return p;
}

SharedCounts shared_counts(std::span<const AttributeValue> u, std::span<const AttributeValue> v) {
  require(u.size() == v.size(), ErrorKind::kInvalidAssignment, "rows differ in length");
  SharedCounts c;
  for (std::size_t i = 0; i < u.size(); ++i) {
    require(u[i] <= 1 && v[i] <= 1, ErrorKind::kInvalidAssignment,
            "shared_counts requires binary rows");
    if (u[i] == v[i]) (u[i] == 0 ? c.both_zero : c.both_one)++;
  }
  return c;
}

SharedCounts shared_counts_packed(std::span<const std::uint64_t> u,
                                  std::span<const std::uint64_t> v, std::size_t l) noexcept {
  SharedCounts c;
  for (std::size_t w = 0; w < u.size(); ++w) {
    const std::size_t bits = std::min<std::size_t>(64, l - w * 64);
    const std::uint64_t mask = bits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
    c.both_one += static_cast<std::size_t>(std::popcount(u[w] & v[w]));
    c.both_zero += static_cast<std::size_t>(std::popcount(~(u[w] | v[w]) & mask));
  }
  return c;
}

std::size_t node_weight(std::span<const AttributeValue> row) {
  std::size_t weight = 0;
  for (AttributeValue a : row) {
    require(a <= 1, ErrorKind::kInvalidAssignment, "node_weight requires a binary row");
    weight += a == 0;
  }
  return weight;
}

std::pair<MagConfig, AttributeAssignment> kronecker_to_mag(const AffinityMatrix& initiator,
                                                           std::size_t l) {
  require(initiator.dim() == 2, ErrorKind::kInvalidConfig, "initiator must be 2x2");
  require(l >= 1, ErrorKind::kInvalidConfig, "l must be positive");
  require(l < 32, ErrorKind::kCapacity, "2^l nodes exceed node id width");
  const std::size_t n = std::size_t{1} << l;
  std::vector<CategoricalAttribute> attrs(l, CategoricalAttribute{{0.5, 0.5}, initiator});
  std::vector<AttributeValue> values(n * l);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t i = 0; i < l; ++i)
      values[u * l + i] = static_cast<AttributeValue>((u >> (l - 1 - i)) & 1u);
  return {MagConfig::general(n, std::move(attrs)), AttributeAssignment(n, l, std::move(values))};
}

void write_attributes(std::ostream& out, const AttributeAssignment& attributes) {
  out << attributes.n() << ' ' << attributes.l() << '\n';
  std::string line;
  for (std::size_t u = 0; u < attributes.n(); ++u) {
    line.clear();
    const auto row = attributes.row(u);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) line.push_back(' ');
      line += std::to_string(row[i]);
    }
    line.push_back('\n');
    out << line;
  }
}

AttributeAssignment read_attributes(std::istream& in) {
  std::string header;
  require(static_cast<bool>(std::getline(in, header)), ErrorKind::kIo,
          "attribute file: missing header");
  std::istringstream hs(header);
  std::size_t n = 0, l = 0;
  require(static_cast<bool>(hs >> n >> l), ErrorKind::kIo,
          "attribute file: header must be \"n l\"");
  std::vector<AttributeValue> values;
  values.reserve(n * l);
  std::string line;
  for (std::size_t u = 0; u < n; ++u) {
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::kIo,
            "attribute file: expected " + std::to_string(n) + " rows");
    std::istringstream ls(line);
    unsigned long value = 0;
    std::size_t count = 0;
    while (ls >> value) {
      require(value <= std::numeric_limits<AttributeValue>::max(), ErrorKind::kIo,
              "attribute file: value too large on line " + std::to_string(u + 2));
      values.push_back(static_cast<AttributeValue>(value));
      ++count;
    }
    require(count == l && ls.eof(), ErrorKind::kIo,
            "attribute file: line " + std::to_string(u + 2) + " must hold " + std::to_string(l) +
                " integers");
  }
  return AttributeAssignment(n, l, std::move(values));
}

}  // namespace magnet
