#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "magnet/cli.hpp"
#include "magnet/generate.hpp"
#include "magnet/metrics.hpp"
#include "magnet/parallel.hpp"
#include "magnet/stats.hpp"
#include "magnet/theory.hpp"

namespace magnet::cli {

namespace {

namespace fs = std::filesystem;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kDiameterBound = 10.0;
constexpr std::size_t kSampledSources = 256;

struct Options {
  std::string config;
  std::string graph;
  std::string out;
  std::string method = "bucketed";
  std::uint64_t seed = 1;
  std::size_t seeds = 0;  // 0 = from config or command default
  unsigned jobs = 1;
  bool exact_diameter = false;
};

std::string real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write '" + path.string() + "'");
  writer(out);
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

fs::path output_dir(const Options& o) {
  require(!o.out.empty(), ErrorKind::kInvalidConfig, "--out is required");
  fs::create_directories(o.out);
  return o.out;
}

GenerationMethod method_of(const Options& o) {
  if (o.method == "bucketed") return GenerationMethod::kBucketed;
  if (o.method == "naive") return GenerationMethod::kNaive;
  fail(ErrorKind::kInvalidConfig, "unknown --method '" + o.method + "' (expected naive or bucketed)");
}

BfsMode bfs_of(const Options& o, std::uint64_t seed) {
  if (o.exact_diameter) return ExactBfs{};
  return SampledBfs{kSampledSources, seed};
}

std::vector<std::uint64_t> seeds_of(const Options& o, std::size_t configured) {
  const std::size_t count = o.seeds != 0 ? o.seeds : configured;
  std::vector<std::uint64_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = o.seed + i;
  return out;
}

std::optional<double> expected_edges_of(const MagConfig& c) {
  if (std::holds_alternative<GeneralModel>(c.model())) return std::nullopt;
  return expected_edges(c);
}

std::string realized_rho(const MagConfig& c) { return c.n() >= 2 ? real(c.rho()) : "nan"; }

void write_graph_files(const fs::path& dir, const GeneratedGraph& g) {
  write_file(dir / "graph.tsv", [&](std::ostream& s) { write_edge_list(s, g.graph); });
  write_file(dir / "attributes.txt", [&](std::ostream& s) { write_attributes(s, g.attributes); });
}

// Effective diameter, or +inf when no pair is connected.
double diameter_or_inf(const Graph& g, const BfsMode& mode) {
  try {
    return effective_diameter(g, 0.9, mode);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kUndefined) throw;
    return std::numeric_limits<double>::infinity();
  }
}

int cmd_generate(const Options& o, std::ostream& out) {
  require(!o.config.empty(), ErrorKind::kInvalidConfig, "--config is required");
  const auto parsed = load_config(o.config);
  const auto dir = output_dir(o);
  const auto g = generate(parsed.config, o.seed, method_of(o), {o.jobs});
  write_graph_files(dir, g);
  out << "nodes=" << g.graph.n() << "\n";
  out << "edges=" << g.graph.num_edges() << "\n";
  if (const auto e = expected_edges_of(parsed.config)) out << "expected_edges=" << real(*e) << "\n";
  out << "l=" << parsed.config.l() << "\n";
  out << "rho=" << realized_rho(parsed.config) << "\n";
  if (parsed.requested_rho) out << "requested_rho=" << real(*parsed.requested_rho) << "\n";
  out << "seed=" << o.seed << "\n";
  return 0;
}

int cmd_theory(const Options& o, std::ostream& out) {
  require(!o.config.empty(), ErrorKind::kInvalidConfig, "--config is required");
  const auto parsed = load_config(o.config);
  const auto& c = parsed.config;
  if (c.simplified_model()) {
    write_theory_report(out, theory_report(c));
    if (parsed.requested_rho) out << "requested_rho=" << real(*parsed.requested_rho) << "\n";
    return 0;
  }
  require(std::holds_alternative<PowerLawModel>(c.model()), ErrorKind::kInvalidConfig,
          "closed forms need a simplified or power-law config");
  const auto& model = std::get<PowerLawModel>(c.model());
  out << "n=" << c.n() << "\n";
  out << "l=" << c.l() << "\n";
  out << "rho=" << realized_rho(c) << "\n";
  out << "self_edges=" << (c.self_edges() ? 1 : 0) << "\n";
  for (std::size_t i = 0; i < c.l(); ++i) {
    const auto& t = model.thetas[i];
    out << "mu." << i << "=" << real(model.mus[i]) << "\n";
    out << "alpha." << i << "=" << real(t.alpha()) << "\n";
    out << "beta." << i << "=" << real(t.beta()) << "\n";
    out << "gamma." << i << "=" << real(t.gamma()) << "\n";
    if (parsed.delta)
      out << "residual." << i << "=" << real(powerlaw_condition_residual(model.mus[i], t, *parsed.delta)) << "\n";
  }
  out << "expected_edges=" << real(expected_edges(c)) << "\n";
  if (parsed.delta) {
    out << "delta=" << real(*parsed.delta) << "\n";
    out << "pdf_exponent=" << real(*parsed.delta + 0.5) << "\n";
    out << "ccdf_exponent=" << real(*parsed.delta - 0.5) << "\n";
  }
  return 0;
}

struct TaskResult {
  double edges = kNan;
  double largest = kNan;
  bool giant = false;
  bool connected = false;
  double diameter = kNan;
};

int cmd_sweep(const Options& o, std::ostream& out) {
  require(!o.config.empty(), ErrorKind::kInvalidConfig, "--config is required");
  const auto spec = make_experiment(load_config(o.config));
  const auto dir = output_dir(o);
  const auto seeds = seeds_of(o, spec.seeds.size());
  const auto& values = spec.values;
  std::vector<MagConfig> configs;
  for (double v : values) configs.push_back(spec.config_at(v));
  const bool want_edges = spec.metrics.count("edges") != 0;
  const bool want_components = spec.metrics.count("giant") || spec.metrics.count("connected");
  const bool want_diameter = spec.metrics.count("diameter") != 0;

  std::vector<TaskResult> results(values.size() * seeds.size());
  parallel_for(results.size(), o.jobs, [&](std::size_t task) {
    const std::size_t point = task / seeds.size();
    const std::uint64_t seed = seeds[task % seeds.size()];
    const auto g = generate(configs[point], seed, method_of(o));
    const auto task_dir = dir / ("run-" + std::to_string(seed)) / ("point-" + std::to_string(point));
    fs::create_directories(task_dir);
    write_graph_files(task_dir, g);
    TaskResult r;
    std::ostringstream metrics;
    metrics << "sweep_value=" << real(values[point]) << "\nseed=" << seed << "\n";
    if (want_edges) {
      r.edges = static_cast<double>(g.graph.num_edges());
      metrics << "edges=" << g.graph.num_edges() << "\n";
    }
    if (want_components) {
      const auto sizes = connected_components(g.graph);
      r.largest = static_cast<double>(sizes.front()) / static_cast<double>(g.graph.n());
      r.giant = 2 * sizes.front() >= g.graph.n();
      r.connected = sizes.size() == 1;
      metrics << "largest_fraction=" << real(r.largest) << "\ncomponents=" << sizes.size() << "\n";
    }
    if (want_diameter) {
      r.diameter = diameter_or_inf(g.graph, bfs_of(o, seed));
      metrics << "effective_diameter=" << real(r.diameter) << "\n";
    }
    write_file(task_dir / "metrics.txt", [&](std::ostream& s) { s << metrics.str(); });
    results[task] = r;
  });

  std::string rho_list;
  for (const auto& c : configs) rho_list += (rho_list.empty() ? "" : ";") + realized_rho(c);

  struct Column {
    std::string name;
    std::function<double(const TaskResult&)> value;
    std::function<bool(const TaskResult&)> success;  // empty for edges
    std::function<double(const MagConfig&)> analytic;
  };
  std::vector<Column> columns;
  if (want_edges)
    columns.push_back({"edges", [](const TaskResult& r) { return r.edges; }, {},
                       [](const MagConfig& c) { return expected_edges_of(c).value_or(kNan); }});
  auto analytic_or_nan = [](ScanProperty p) {
    return [p](const MagConfig& c) { return c.simplified_model() ? analytic_value(c, p) : kNan; };
  };
  if (spec.metrics.count("giant"))
    columns.push_back({"giant", [](const TaskResult& r) { return r.largest; },
                       [](const TaskResult& r) { return r.giant; }, analytic_or_nan(ScanProperty::kGiant)});
  if (spec.metrics.count("connected"))
    columns.push_back({"connected", [](const TaskResult& r) { return r.largest; },
                       [](const TaskResult& r) { return r.connected; },
                       analytic_or_nan(ScanProperty::kConnected)});
  if (want_diameter)
    columns.push_back({"diameter", [](const TaskResult& r) { return r.diameter; },
                       [](const TaskResult& r) { return r.diameter <= kDiameterBound; },
                       analytic_or_nan(ScanProperty::kDiameter)});

  std::ofstream summary(dir / "summary.txt");
  require(static_cast<bool>(summary), ErrorKind::kIo, "cannot write summary.txt");
  summary << "sweep=" << to_string(spec.axis) << "\nseeds=" << seeds.size() << "\npoints=" << values.size() << "\n";
  std::vector<double> means_edges, means_diameter;

  for (const auto& col : columns) {
    std::vector<ScanPoint> points;
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::vector<double> finite;
      std::size_t hits = 0;
      for (std::size_t s = 0; s < seeds.size(); ++s) {
        const auto& r = results[i * seeds.size() + s];
        const double v = col.value(r);
        if (std::isfinite(v)) finite.push_back(v);
        if (col.success && col.success(r)) ++hits;
      }
      TrialSummary t{seeds.size(), kNan, kNan, hits};
      if (!finite.empty()) {
        const auto f = summarize(finite);
        t.mean = f.mean;
        t.std_error = f.std_error;
      }
      points.push_back({values[i], t, col.analytic(configs[i])});
    }
    if (col.name == "edges")
      for (const auto& p : points) means_edges.push_back(p.summary.mean);
    if (col.name == "diameter")
      for (const auto& p : points) means_diameter.push_back(p.summary.mean);

    write_file(dir / (col.name + ".csv"), [&](std::ostream& s) {
      s << "# metric=" << col.name << " sweep=" << to_string(spec.axis) << " seeds=" << seeds.size()
        << " rho=" << rho_list;
      if (col.name == "diameter")
        s << " bfs=" << (o.exact_diameter ? "exact" : "sampled") << " bound=" << real(kDiameterBound);
      s << "\nsweep_value,seeds,mean,std_error,success_fraction,analytic_value\n";
      for (const auto& p : points) {
        const double fraction = col.success ? static_cast<double>(p.summary.successes) /
                                                  static_cast<double>(p.summary.seeds)
                                            : kNan;
        s << real(p.value) << "," << p.summary.seeds << "," << real(p.summary.mean) << ","
          << real(p.summary.std_error) << "," << real(fraction) << "," << real(p.analytic) << "\n";
      }
    });

    if (!col.success || spec.axis == SweepAxis::kNone) continue;
    const auto scan = assemble_scan(points);
    summary << col.name << "_monotone=" << (scan.monotone ? 1 : 0) << "\n";
    summary << col.name << "_empirical_crossing=" << (scan.crossing ? real(*scan.crossing) : "none") << "\n";
    std::string analytic = "none";
    if (spec.axis != SweepAxis::kN && values.size() >= 2 && configs.front().simplified_model()) {
      const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
      const auto property = col.name == "giant"       ? ScanProperty::kGiant
                            : col.name == "connected" ? ScanProperty::kConnected
                                                      : ScanProperty::kDiameter;
      try {
        analytic = real(analytic_crossing([&](double v) { return spec.config_at(v); }, property, *lo, *hi));
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::kNumerical) throw;
      }
    }
    summary << col.name << "_analytic_crossing=" << analytic << "\n";
  }

  if (spec.axis == SweepAxis::kN && !means_edges.empty()) {
    std::vector<Point> pts;
    for (std::size_t i = 0; i < values.size(); ++i) pts.emplace_back(values[i], means_edges[i]);
    std::vector<double> x, y;
    for (const auto& [n, m] : pts) {
      if (m > 0) {
        x.push_back(std::log(n));
        y.push_back(std::log(m));
      }
    }
    if (x.size() >= 2) summary << "edges_loglog_slope=" << real(polynomial_fit(x, y, 1).coefficients[0]) << "\n";
    if (configs.front().simplified_model()) {
      const auto& s = *configs.front().simplified_model();
      const double rho = spec.base.requested_rho.value_or(configs.front().rho());
      summary << "densification_exponent=" << real(2.0 + rho * std::log2(AffinitySummary::of(s.mu, s.theta).zeta)) << "\n";
    }
  }
  if (spec.axis == SweepAxis::kN && means_diameter.size() >= 2) {
    std::size_t ok = 0;
    for (std::size_t i = 1; i < means_diameter.size(); ++i) ok += means_diameter[i] <= means_diameter[i - 1];
    summary << "diameter_nonincreasing_fraction="
            << real(static_cast<double>(ok) / static_cast<double>(means_diameter.size() - 1)) << "\n";
  }
  summary.close();
  std::ifstream back(dir / "summary.txt");
  out << back.rdbuf();
  return 0;
}

template <typename Map>
std::vector<std::pair<double, double>> as_rows(const Map& m) {
  std::vector<std::pair<double, double>> rows;
  for (const auto& [k, v] : m) rows.emplace_back(static_cast<double>(k), static_cast<double>(v));
  return rows;
}

double safe_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return kNan;
  try {
    return spearman(x, y);
  } catch (const Error&) {
    return kNan;
  }
}

int cmd_panel(const Options& o, std::ostream& out) {
  require(o.config.empty() != o.graph.empty(), ErrorKind::kInvalidConfig,
          "panel needs exactly one of --config and --graph");
  const auto dir = output_dir(o);
  std::vector<std::pair<std::string, std::string>> fields;
  std::optional<Graph> graph;
  std::size_t rank = 32;
  if (!o.config.empty()) {
    const auto parsed = load_config(o.config);
    if (const auto it = parsed.values.find("singular_values"); it != parsed.values.end()) {
      const auto v = std::strtoull(it->second.c_str(), nullptr, 10);
      require(v > 0, ErrorKind::kInvalidConfig, o.config + ": 'singular_values' must be a positive integer");
      rank = v;
    }
    auto g = generate(parsed.config, o.seed, method_of(o), {o.jobs});
    write_graph_files(dir, g);
    graph = std::move(g.graph);
    fields = {{"source", o.config}, {"seed", std::to_string(o.seed)}, {"rho", realized_rho(parsed.config)}};
  } else {
    std::ifstream in(o.graph);
    require(static_cast<bool>(in), ErrorKind::kIo, "cannot open graph '" + o.graph + "'");
    graph = read_edge_list(in);
    fields = {{"source", o.graph}, {"rho", "unknown"}};
  }
  const Graph& g = *graph;
  auto csv = [&](const std::string& name, const std::string& metric,
                 const std::vector<std::pair<double, double>>& rows) {
    write_file(dir / name, [&](std::ostream& s) { write_xy_csv(s, {metric, fields}, rows); });
  };

  const auto degrees = degree_distribution(g);
  csv("degree.csv", "degree_pdf", as_rows(degrees.pdf));

  rank = std::min(rank, g.n());
  const auto spectrum = top_singular(g, rank, 1e-8, 5000, o.seed, o.jobs);
  std::vector<std::pair<double, double>> sv, svec;
  for (std::size_t i = 0; i < spectrum.values.size(); ++i) sv.emplace_back(i + 1, spectrum.values[i]);
  for (std::size_t i = 0; i < spectrum.leading_vector.size(); ++i)
    svec.emplace_back(i + 1, spectrum.leading_vector[i]);
  csv("sv.csv", "singular_values", sv);
  csv("svec.csv", "leading_singular_vector", svec);

  const auto ccf = clustering_by_degree(g);
  csv("ccf.csv", "clustering_by_degree", as_rows(ccf));
  csv("triad.csv", "triad_participation", as_rows(triad_participation(g)));

  auto plot = hop_plot(g, g.n(), o.jobs).points;
  while (plot.size() >= 2 && plot[plot.size() - 2].second == plot.back().second) plot.pop_back();
  csv("hop.csv", "hop_plot", as_rows(std::map<std::size_t, std::uint64_t>(plot.begin(), plot.end())));

  std::vector<double> kx, cy, tx, ty;
  const auto median = static_cast<double>(median_degree(degrees));
  for (const auto& [k, c] : ccf) {
    if (k < 2) continue;
    kx.push_back(static_cast<double>(k));
    cy.push_back(c);
    if (static_cast<double>(k) >= median) {
      tx.push_back(static_cast<double>(k));
      ty.push_back(c);
    }
  }
  out << "nodes=" << g.n() << "\nedges=" << g.num_edges() << "\n";
  out << "top_singular_value=" << real(spectrum.values.front()) << "\n";
  out << "ccf_spearman=" << real(safe_spearman(kx, cy)) << "\n";
  out << "ccf_tail_spearman=" << real(safe_spearman(tx, ty)) << "\n";
  return 0;
}

int cmd_compare(const Options& o, std::ostream& out) {
  require(!o.config.empty(), ErrorKind::kInvalidConfig, "--config is required");
  const auto parsed = load_config(o.config);
  const auto& c = parsed.config;
  const std::size_t configured = parsed.values.count("seeds") ? make_experiment(parsed).seeds.size() : 30;
  const auto seeds = seeds_of(o, configured);
  require(seeds.size() >= 10, ErrorKind::kInsufficientData, "compare needs at least 10 seeds");
  const auto expected = expected_edges_of(c);
  require(expected.has_value(), ErrorKind::kInvalidConfig, "compare needs a simplified or power-law config");
  const auto method = method_of(o);

  std::vector<TaskResult> results(seeds.size());
  parallel_for(seeds.size(), o.jobs, [&](std::size_t i) {
    const auto g = generate(c, seeds[i], method).graph;
    const auto sizes = connected_components(g);
    results[i] = {static_cast<double>(g.num_edges()), static_cast<double>(sizes.front()) / static_cast<double>(g.n()),
                  2 * sizes.front() >= g.n(), sizes.size() == 1, diameter_or_inf(g, bfs_of(o, seeds[i]))};
  });
  std::vector<double> edges, largest, diameters;
  std::size_t giant = 0, connected = 0;
  for (const auto& r : results) {
    edges.push_back(r.edges);
    largest.push_back(r.largest);
    if (std::isfinite(r.diameter)) diameters.push_back(r.diameter);
    giant += r.giant;
    connected += r.connected;
  }
  const auto e = summarize(edges);
  const double z = e.std_error > 0 ? (e.mean - *expected) / e.std_error
                                   : (e.mean == *expected ? 0.0 : std::copysign(INFINITY, e.mean - *expected));
  const double count = static_cast<double>(seeds.size());
  out << "method=" << o.method << "\nseeds=" << seeds.size() << "\n";
  out << "expected_edges=" << real(*expected) << "\nmean_edges=" << real(e.mean) << "\n";
  out << "std_error=" << real(e.std_error) << "\nz=" << real(z) << "\n";
  out << "largest_fraction_mean=" << real(summarize(largest).mean) << "\n";
  out << "giant_fraction=" << real(static_cast<double>(giant) / count) << "\n";
  out << "connected_fraction=" << real(static_cast<double>(connected) / count) << "\n";
  out << "diameter_mean=" << real(diameters.empty() ? kNan : summarize(diameters).mean) << "\n";
  out << "diameter_bfs=" << (o.exact_diameter ? "exact" : "sampled") << "\n";
  if (c.simplified_model()) {
    out << "giant_verdict=" << to_string(giant_component_criterion(c).verdict) << "\n";
    out << "connected_verdict=" << to_string(connectivity_criterion(c).verdict) << "\n";
    out << "diameter_verdict=" << to_string(diameter_criterion(c).verdict) << "\n";
  }
  return 0;
}

int exit_code(ErrorKind kind) {
  return kind == ErrorKind::kNumerical || kind == ErrorKind::kUndefined ? 2 : 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiplicative attribute graph toolkit", "magnet"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Config file (key=value lines)");
    sub->add_option("--seed", o.seed, "Root seed (first seed for multi-seed commands)");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--jobs", o.jobs, "Worker threads (0 = all cores)");
  };
  auto* generate_cmd = app.add_subcommand("generate", "Sample one graph");
  add_common(generate_cmd);
  generate_cmd->add_option("--method", o.method, "naive or bucketed");
  auto* theory_cmd = app.add_subcommand("theory", "Print closed-form predictions");
  theory_cmd->add_option("--config", o.config, "Config file")->required();
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep over seeds");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--seeds", o.seeds, "Number of seeds");
  sweep_cmd->add_flag("--exact-diameter", o.exact_diameter, "All-source BFS for diameters");
  sweep_cmd->add_option("--method", o.method, "naive or bucketed");
  auto* panel_cmd = app.add_subcommand("panel", "Structural metrics of one graph");
  add_common(panel_cmd);
  panel_cmd->add_option("--graph", o.graph, "Edge list instead of a config");
  panel_cmd->add_option("--method", o.method, "naive or bucketed");
  auto* compare_cmd = app.add_subcommand("compare", "Empirical versus theoretical properties");
  add_common(compare_cmd);
  compare_cmd->add_option("--seeds", o.seeds, "Number of seeds");
  compare_cmd->add_flag("--exact-diameter", o.exact_diameter, "All-source BFS for diameters");
  compare_cmd->add_option("--method", o.method, "naive or bucketed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*generate_cmd) return cmd_generate(o, out);
    if (*theory_cmd) return cmd_theory(o, out);
    if (*sweep_cmd) return cmd_sweep(o, out);
    if (*panel_cmd) return cmd_panel(o, out);
    if (*compare_cmd) return cmd_compare(o, out);
  } catch (const Error& e) {
    err << "error (" << magnet::to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error (io): " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace magnet::cli
