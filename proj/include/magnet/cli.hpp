#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "magnet/core.hpp"

namespace magnet::cli {

// A parsed config file: the model plus the raw key/value pairs, so experiment
// keys can be read from the same file.
struct ParsedConfig {
  MagConfig config;
  std::optional<double> requested_rho;  // when l was derived from rho
  std::optional<double> delta;          // power-law exponent parameter
  std::map<std::string, std::string> values;
  std::map<std::string, std::size_t> lines;  // key -> 1-based line number
  std::string source;
};

// Parses flat key=value text. Errors are kInvalidConfig and name the source
// and line.
ParsedConfig parse_config(std::istream& in, const std::string& source = "config");
ParsedConfig load_config(const std::filesystem::path& path);

// l = round-half-up(rho * log2(n)), at least 1.
std::size_t l_from_rho(std::size_t n, double rho);

enum class SweepAxis { kNone, kMu, kAlpha, kF, kN };

const char* to_string(SweepAxis axis);

struct ExperimentSpec {
  ParsedConfig base;
  SweepAxis axis = SweepAxis::kNone;
  std::vector<double> values;  // a single NaN placeholder when axis is kNone
  std::optional<SimplifiedTheta> theta0;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path out;
  std::set<std::string> metrics;  // subset of edges, giant, connected, diameter

  MagConfig config_at(double value) const;
};

// Reads sweep, values, theta0, seeds and metrics keys from a parsed config.
ExperimentSpec make_experiment(ParsedConfig base);

// Value lists: comma separated numbers, "2^k" powers, or "start:step:stop".
std::vector<double> parse_value_list(const std::string& text);

// Runs the command line; returns the process exit code (0 ok, 1 validation,
// 2 numerical).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace magnet::cli
