#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "magnet/cli.hpp"
#include "magnet/generate.hpp"
#include "magnet/metrics.hpp"
#include "magnet/theory.hpp"

namespace py = pybind11;
using namespace magnet;

namespace {

GenerationMethod method_of(const std::string& name) {
  if (name == "bucketed") return GenerationMethod::kBucketed;
  if (name == "naive") return GenerationMethod::kNaive;
  throw py::value_error("method must be 'naive' or 'bucketed'");
}

py::array_t<std::uint32_t> edge_array(const Graph& g) {
  py::array_t<std::uint32_t> out({g.num_edges(), std::size_t{2}});
  auto view = out.mutable_unchecked<2>();
  std::size_t i = 0;
  for (const auto& e : g.edges()) {
    view(i, 0) = e.u;
    view(i, 1) = e.v;
    ++i;
  }
  return out;
}

Graph graph_of(std::size_t n, const py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast>& edges,
               bool self_edges) {
  if (edges.ndim() != 2 || edges.shape(1) != 2) throw py::value_error("edges must have shape (m, 2)");
  const auto view = edges.unchecked<2>();
  std::vector<Edge> list;
  list.reserve(static_cast<std::size_t>(edges.shape(0)));
  for (py::ssize_t i = 0; i < edges.shape(0); ++i) list.push_back({view(i, 0), view(i, 1)});
  return Graph(n, std::move(list), self_edges);
}

py::dict report_dict(const TheoryReport& r) {
  py::dict d;
  d["n"] = r.n;
  d["l"] = r.l;
  d["rho"] = r.rho;
  d["mu"] = r.mu;
  d["x"] = r.summary.x;
  d["y"] = r.summary.y;
  d["zeta"] = r.summary.zeta;
  d["ratio"] = r.summary.ratio;
  d["lambda"] = r.summary.lambda;
  d["expected_edges"] = r.expected_edges;
  d["densification_exponent"] = r.densification_exponent;
  d["giant_criterion"] = r.giant_criterion;
  d["connectivity_value"] = r.connectivity_value;
  d["nu"] = r.nu ? py::object(py::float_(*r.nu)) : py::object(py::none());
  d["diameter_criterion"] = r.diameter_criterion;
  d["lognormal_mean"] = r.lognormal_mean;
  d["lognormal_variance"] = r.lognormal_variance;
  d["giant_verdict"] = to_string(r.giant_verdict);
  d["connected_verdict"] = to_string(r.connected_verdict);
  d["diameter_verdict"] = to_string(r.diameter_verdict);
  d["warnings"] = r.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_magnet, m) {
  m.doc() = "Multiplicative attribute graph toolkit";

  static py::exception<Error> error(m, "MagnetError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  py::class_<MagConfig>(m, "Config")
      .def_property_readonly("n", &MagConfig::n)
      .def_property_readonly("l", &MagConfig::l)
      .def_property_readonly("self_edges", &MagConfig::self_edges)
      .def_property_readonly("rho", &MagConfig::rho)
      .def("with_n", &MagConfig::with_n)
      .def("with_l", &MagConfig::with_l);

  m.def(
      "simplified",
      [](std::size_t n, std::size_t l, double mu, double alpha, double beta, double gamma, bool self_edges) {
        return MagConfig::simplified(n, l, mu, SimplifiedTheta::make(alpha, beta, gamma), self_edges);
      },
      py::arg("n"), py::arg("l"), py::arg("mu"), py::arg("alpha"), py::arg("beta"), py::arg("gamma"),
      py::arg("self_edges") = false);

  m.def(
      "parse_config", [](const std::string& text) {
        std::istringstream in(text);
        return cli::parse_config(in, "<string>").config;
      },
      py::arg("text"), "Model from key=value config text.");
  m.def(
      "load_config", [](const std::string& path) { return cli::load_config(path).config; }, py::arg("path"));

  m.def(
      "generate",
      [](const MagConfig& c, std::uint64_t seed, const std::string& method, unsigned threads) {
        const auto g = generate(c, seed, method_of(method), {threads});
        py::array_t<std::uint16_t> attrs({c.n(), c.l()});
        auto view = attrs.mutable_unchecked<2>();
        for (std::size_t u = 0; u < c.n(); ++u)
          for (std::size_t i = 0; i < c.l(); ++i) view(u, i) = g.attributes.value(u, i);
        return py::make_tuple(edge_array(g.graph), attrs);
      },
      py::arg("config"), py::arg("seed"), py::arg("method") = "bucketed", py::arg("threads") = 1,
      "Returns (edges[m, 2], attributes[n, l]).");

  m.def("expected_edges", &expected_edges, py::arg("config"));
  m.def(
      "theory_report", [](const MagConfig& c) { return report_dict(theory_report(c)); }, py::arg("config"));
  m.def("theoretical_degree_pmf", &theoretical_degree_pmf, py::arg("config"), py::arg("k_max"));

  m.def(
      "effective_diameter",
      [](std::size_t n, const py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast>& edges,
         double percentile, std::size_t sources, std::uint64_t seed, bool self_edges) {
        const BfsMode mode = sources == 0 ? BfsMode{ExactBfs{}} : BfsMode{SampledBfs{sources, seed}};
        return effective_diameter(graph_of(n, edges, self_edges), percentile, mode);
      },
      py::arg("n"), py::arg("edges"), py::arg("percentile") = 0.9, py::arg("sources") = 0, py::arg("seed") = 0,
      py::arg("self_edges") = false, "sources=0 runs BFS from every node.");
  m.def(
      "connected_components",
      [](std::size_t n, const py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast>& edges,
         bool self_edges) { return connected_components(graph_of(n, edges, self_edges)); },
      py::arg("n"), py::arg("edges"), py::arg("self_edges") = false);
}
