#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "magnet/cli.hpp"
#include "magnet/theory.hpp"

namespace magnet::cli {

namespace {

const std::set<std::string> kScalarKeys{
    "n",        "l",      "rho",   "mu",       "alpha",        "beta",
    "gamma",    "self_edges",     "variant",  "delta",        "construction",
    "z",        "top_edge_probability",        "probs",        "affinity",
    "sweep",    "values", "theta0", "seeds",   "metrics",      "singular_values"};
const std::set<std::string> kIndexedKeys{"mu", "alpha", "beta", "gamma", "probs", "affinity"};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

class Reader {
 public:
  explicit Reader(const ParsedConfig& parsed) : p_(parsed) {}

  bool has(const std::string& key) const { return p_.values.count(key) != 0; }

  [[noreturn]] void error(const std::string& key, const std::string& message) const {
    const auto it = p_.lines.find(key);
    if (it == p_.lines.end()) fail(ErrorKind::kInvalidConfig, p_.source + ": " + message);
    fail(ErrorKind::kInvalidConfig,
         p_.source + ":" + std::to_string(it->second) + ": " + message);
  }

  const std::string& text(const std::string& key) const {
    const auto it = p_.values.find(key);
    if (it == p_.values.end()) error(key, "missing key '" + key + "'");
    return it->second;
  }

  double real(const std::string& key) const { return parse_real(key, text(key)); }

  double parse_real(const std::string& key, const std::string& t) const {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
      error(key, "'" + key + "' expects a number, got '" + t + "'");
    return v;
  }

  std::size_t count(const std::string& key) const {
    const auto& t = text(key);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
      error(key, "'" + key + "' expects a positive integer, got '" + t + "'");
    errno = 0;
    const unsigned long long v = std::strtoull(t.c_str(), nullptr, 10);
    if (errno == ERANGE || v == 0) error(key, "'" + key + "' expects a positive integer");
    return static_cast<std::size_t>(v);
  }

  bool flag(const std::string& key) const {
    const auto& t = text(key);
    if (t == "1" || t == "true" || t == "yes") return true;
    if (t == "0" || t == "false" || t == "no") return false;
    error(key, "'" + key + "' expects 0/1 or true/false");
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream s(text(key));
    std::string item;
    while (std::getline(s, item, ',')) out.push_back(parse_real(key, trim(item)));
    if (out.empty()) error(key, "'" + key + "' expects a comma-separated list");
    return out;
  }

  double in_open_unit(const std::string& key) const {
    const double v = real(key);
    if (!(v > 0.0 && v < 1.0)) error(key, "'" + key + "' must lie in (0,1)");
    return v;
  }

  double in_closed_unit(const std::string& key) const {
    const double v = real(key);
    if (!(v >= 0.0 && v <= 1.0)) error(key, "'" + key + "' must lie in [0,1]");
    return v;
  }

  double positive(const std::string& key) const {
    const double v = real(key);
    if (!(v > 0.0)) error(key, "'" + key + "' must be positive");
    return v;
  }

  // Indexed key when present, otherwise the shared key.
  std::string pick(const std::string& key, std::size_t i) const {
    const auto indexed = key + "." + std::to_string(i);
    return has(indexed) ? indexed : key;
  }

 private:
  const ParsedConfig& p_;
};

SimplifiedTheta theta_at(const Reader& r, std::size_t i, bool core_periphery) {
  const auto a = r.pick("alpha", i), b = r.pick("beta", i), g = r.pick("gamma", i);
  try {
    return SimplifiedTheta::make(r.in_open_unit(a), r.in_open_unit(b), r.in_open_unit(g),
                                 core_periphery);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kInvalidConfig) throw;
    r.error(a, "attribute " + std::to_string(i) + ": " + e.what());
  }
}

MagConfig build_model(ParsedConfig& p) {
  const Reader r(p);
  const std::size_t n = r.count("n");
  if (r.has("l") == r.has("rho")) r.error("l", "exactly one of 'l' and 'rho' must be given");
  std::size_t l = 0;
  if (r.has("rho")) {
    if (n < 2) r.error("n", "'rho' needs n >= 2");
    p.requested_rho = r.positive("rho");
    l = l_from_rho(n, *p.requested_rho);
  } else {
    l = r.count("l");
  }
  for (const auto& [key, value] : p.values) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) continue;
    const auto index = std::strtoull(key.c_str() + dot + 1, nullptr, 10);
    if (index >= l) r.error(key, "'" + key + "' indexes past the last attribute (l=" + std::to_string(l) + ")");
  }
  const bool self = r.has("self_edges") && r.flag("self_edges");
  const std::string variant = r.has("variant") ? r.text("variant") : "simplified";

  if (variant == "simplified") {
    bool indexed = false;
    for (const auto& [key, value] : p.values) indexed |= key.find('.') != std::string::npos;
    if (!indexed) return MagConfig::simplified(n, l, r.in_closed_unit("mu"), theta_at(r, 0, false), self);
    // Per-attribute overrides give a heterogeneous binary config.
    std::vector<double> mus;
    std::vector<SimplifiedTheta> thetas;
    for (std::size_t i = 0; i < l; ++i) {
      mus.push_back(r.in_closed_unit(r.pick("mu", i)));
      thetas.push_back(theta_at(r, i, false));
    }
    return MagConfig::power_law(n, std::move(mus), std::move(thetas), self);
  }

  if (variant == "power_law") {
    std::vector<SimplifiedTheta> thetas;
    if (r.has("construction")) {
      if (r.text("construction") != "geometric_levels")
        r.error("construction", "unknown construction '" + r.text("construction") + "'");
      p.delta = r.positive("delta");
      thetas = geometric_level_thetas(l, r.positive("z"), *p.delta, r.in_open_unit("top_edge_probability"));
    } else {
      for (std::size_t i = 0; i < l; ++i) thetas.push_back(theta_at(r, i, r.has("delta")));
    }
    if (r.has("delta")) {
      p.delta = r.positive("delta");
      return solve_powerlaw_config(n, thetas, *p.delta, self);
    }
    std::vector<double> mus;
    for (std::size_t i = 0; i < l; ++i) mus.push_back(r.in_closed_unit(r.pick("mu", i)));
    return MagConfig::power_law(n, std::move(mus), std::move(thetas), self);
  }

  if (variant == "general") {
    std::vector<CategoricalAttribute> attributes;
    for (std::size_t i = 0; i < l; ++i) {
      const auto pk = r.pick("probs", i), ak = r.pick("affinity", i);
      auto probs = r.list(pk);
      auto entries = r.list(ak);
      if (entries.size() != probs.size() * probs.size())
        r.error(ak, "'" + ak + "' needs " + std::to_string(probs.size() * probs.size()) + " entries");
      try {
        const auto dim = probs.size();
        attributes.push_back({std::move(probs), AffinityMatrix(dim, std::move(entries))});
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kInvalidConfig) throw;
        r.error(ak, e.what());
      }
    }
    return MagConfig::general(n, std::move(attributes), self);
  }
  r.error("variant", "unknown variant '" + variant + "'");
}

}  // namespace

std::size_t l_from_rho(std::size_t n, double rho) {
  require(n >= 2 && rho > 0.0, ErrorKind::kInvalidConfig, "rho needs n >= 2 and rho > 0");
  const double exact = rho * std::log2(static_cast<double>(n));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(exact + 0.5)));
}

ParsedConfig parse_config(std::istream& in, const std::string& source) {
  std::map<std::string, std::string> values;
  std::map<std::string, std::size_t> lines;
  std::string raw;
  std::size_t number = 0;
  auto bad = [&](const std::string& message) {
    fail(ErrorKind::kInvalidConfig, source + ":" + std::to_string(number) + ": " + message);
  };
  while (std::getline(in, raw)) {
    ++number;
    const auto line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad("expected key=value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
      if (!kScalarKeys.count(key)) bad("unknown key '" + key + "'");
    } else {
      const auto base = key.substr(0, dot), index = key.substr(dot + 1);
      if (!kIndexedKeys.count(base) || index.empty() ||
          index.find_first_not_of("0123456789") != std::string::npos)
        bad("unknown key '" + key + "'");
    }
    if (value.empty()) bad("empty value for '" + key + "'");
    if (!values.emplace(key, value).second) bad("duplicate key '" + key + "'");
    lines[key] = number;
  }
  ParsedConfig parsed{MagConfig::simplified(1, 1, 0.5, SimplifiedTheta::make(0.5, 0.5, 0.5)),
                      std::nullopt, std::nullopt, std::move(values), std::move(lines), source};
  try {
    parsed.config = build_model(parsed);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kInvalidConfig || std::string(e.what()).rfind(source, 0) == 0) throw;
    fail(ErrorKind::kInvalidConfig, source + ": " + e.what());
  }
  return parsed;
}

ParsedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open config '" + path.string() + "'");
  return parse_config(in, path.string());
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kNone: return "none";
    case SweepAxis::kMu: return "mu";
    case SweepAxis::kAlpha: return "alpha";
    case SweepAxis::kF: return "f";
    case SweepAxis::kN: return "n";
  }
  return "unknown";
}

std::vector<double> parse_value_list(const std::string& text) {
  auto number = [&](const std::string& token) {
    const auto t = trim(token);
    double v = 0.0;
    const auto caret = t.find('^');
    char* end = nullptr;
    if (caret != std::string::npos) {
      const double base = std::strtod(t.substr(0, caret).c_str(), &end);
      const double exponent = std::strtod(t.substr(caret + 1).c_str(), nullptr);
      v = std::pow(base, exponent);
    } else {
      errno = 0;
      v = std::strtod(t.c_str(), &end);
      require(!t.empty() && end == t.c_str() + t.size() && errno != ERANGE, ErrorKind::kInvalidConfig,
              "bad number '" + t + "' in value list");
    }
    require(std::isfinite(v), ErrorKind::kInvalidConfig, "bad number '" + t + "' in value list");
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::stringstream s(text);
    std::string a, b, c;
    std::getline(s, a, ':');
    std::getline(s, b, ':');
    std::getline(s, c, ':');
    const double start = number(a), step = number(b), stop = number(c);
    require(step > 0.0 && stop >= start, ErrorKind::kInvalidConfig,
            "range needs start:step:stop with step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i)
      out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
  } else {
    std::stringstream s(text);
    std::string item;
    while (std::getline(s, item, ',')) out.push_back(number(item));
  }
  require(!out.empty(), ErrorKind::kInvalidConfig, "empty value list");
  return out;
}

ExperimentSpec make_experiment(ParsedConfig base) {
  ExperimentSpec spec{std::move(base), SweepAxis::kNone, {}, std::nullopt, {}, {}, {}};
  const Reader rs(spec.base);
  const std::string axis = rs.has("sweep") ? rs.text("sweep") : "none";
  if (axis == "none") {
    spec.axis = SweepAxis::kNone;
  } else if (axis == "mu") {
    spec.axis = SweepAxis::kMu;
  } else if (axis == "alpha") {
    spec.axis = SweepAxis::kAlpha;
  } else if (axis == "f") {
    spec.axis = SweepAxis::kF;
  } else if (axis == "n") {
    spec.axis = SweepAxis::kN;
  } else {
    rs.error("sweep", "unknown sweep axis '" + axis + "' (expected none, mu, alpha, f or n)");
  }
  if (spec.axis == SweepAxis::kNone) {
    if (rs.has("values")) rs.error("values", "'values' needs a sweep axis");
    spec.values = {std::nan("")};
  } else {
    try {
      spec.values = parse_value_list(rs.text("values"));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kInvalidConfig) throw;
      rs.error("values", e.what());
    }
  }
  if (spec.axis == SweepAxis::kMu || spec.axis == SweepAxis::kAlpha || spec.axis == SweepAxis::kF) {
    if (!spec.base.config.simplified_model())
      rs.error("sweep", "a " + axis + " sweep needs a simplified config");
  }
  if (spec.axis == SweepAxis::kF) {
    if (!rs.has("theta0")) rs.error("sweep", "an f sweep requires 'theta0' (alpha,beta,gamma)");
    const auto t = rs.list("theta0");
    if (t.size() != 3) rs.error("theta0", "'theta0' needs three entries");
    try {
      spec.theta0 = SimplifiedTheta::make(t[0], t[1], t[2]);
    } catch (const Error& e) {
      rs.error("theta0", e.what());
    }
  } else if (rs.has("theta0")) {
    rs.error("theta0", "'theta0' is only used by f sweeps");
  }
  if (spec.axis == SweepAxis::kN && spec.base.requested_rho && !spec.base.config.simplified_model())
    rs.error("sweep", "an n sweep at fixed rho needs a simplified config");
  const std::size_t seeds = rs.has("seeds") ? rs.count("seeds") : 1;
  for (std::size_t i = 0; i < seeds; ++i) spec.seeds.push_back(1 + i);
  spec.metrics = {"edges", "giant", "connected", "diameter"};
  if (rs.has("metrics")) {
    spec.metrics.clear();
    std::stringstream s(rs.text("metrics"));
    std::string item;
    while (std::getline(s, item, ',')) {
      item = trim(item);
      if (item != "edges" && item != "giant" && item != "connected" && item != "diameter")
        rs.error("metrics", "unknown metric '" + item + "'");
      spec.metrics.insert(item);
    }
  }
  // Validate every sweep point up front so failures carry the config name.
  for (double v : spec.values) {
    try {
      (void)spec.config_at(v);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kInvalidConfig) throw;
      rs.error("values", "sweep value " + std::to_string(v) + ": " + e.what());
    }
  }
  return spec;
}

MagConfig ExperimentSpec::config_at(double value) const {
  const auto& c = base.config;
  const auto* s = c.simplified_model();
  switch (axis) {
    case SweepAxis::kNone:
      return c;
    case SweepAxis::kMu:
      require(value >= 0.0 && value <= 1.0, ErrorKind::kInvalidConfig, "mu must lie in [0,1]");
      return MagConfig::simplified(c.n(), c.l(), value, s->theta, c.self_edges());
    case SweepAxis::kAlpha:
      return MagConfig::simplified(c.n(), c.l(), s->mu,
                                   SimplifiedTheta::make(value, s->theta.beta(), s->theta.gamma()),
                                   c.self_edges());
    case SweepAxis::kF:
      return MagConfig::simplified(
          c.n(), c.l(), s->mu,
          SimplifiedTheta::make(value * theta0->alpha(), value * theta0->beta(), value * theta0->gamma()),
          c.self_edges());
    case SweepAxis::kN: {
      require(value >= 1.0 && value == std::floor(value) && value < 0x1.0p40, ErrorKind::kInvalidConfig,
              "n sweep values must be positive integers");
      const auto n = static_cast<std::size_t>(value);
      if (base.requested_rho) return c.with_n(n).with_l(l_from_rho(n, *base.requested_rho));
      return c.with_n(n);
    }
  }
  return c;
}

}  // namespace magnet::cli
