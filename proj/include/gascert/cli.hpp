#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gascert/report.hpp"

namespace gascert {

struct RunConfig {
  std::string command;
  // Exactly one of map_name, spec_path, spec_json.
  std::optional<std::string> map_name;
  std::optional<std::string> spec_path;
  std::optional<Json> spec_json;
  ParamMap params;
  int expansion = 0;
  std::optional<int> grid;
  std::optional<int> n;
  int m_max = 64;
  std::uint64_t seed = 1;
  std::size_t samples = 100000;
  std::string out;
  std::string csv;
  int threads = 0;
  std::string g;
  std::vector<double> init;  // original coordinates, newest first
  std::int64_t n_max = 100000;
  double tol = 1e-8;
};

struct CommandResult {
  Json report;
  int exit_code = 0;
};

// Map spec JSON keys: name, k, expr, params, domain [lo, hi], fixed_point (number or null),
// unbounded_below, unbounded_above, description, constraints. Any other key is rejected.
MapSpec map_from_json(const Json& j, const ParamMap& overrides = {});
MapSpec load_map(const RunConfig& cfg);

// Keys mirror the CLI flags: command, map, spec, spec_path, params, expansion, grid, n, mmax,
// seed, samples, out, csv, threads, g, init, nmax, tol.
RunConfig config_from_json(const Json& j);

CommandResult cmd_analyze(const RunConfig& cfg);
CommandResult cmd_regions(const RunConfig& cfg);
CommandResult cmd_catalogue(const RunConfig& cfg);
CommandResult cmd_expand(const RunConfig& cfg);
CommandResult cmd_envelope(const RunConfig& cfg);
CommandResult cmd_embed(const RunConfig& cfg);
CommandResult cmd_simulate(const RunConfig& cfg);
CommandResult run_command(const RunConfig& cfg);

// {error, hint}
Json error_envelope(const std::exception& e);

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace gascert
