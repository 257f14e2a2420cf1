#pragma once

// Run configuration for the command-line front end: JSON round trip, content
// hash, and the subcommand dispatcher that writes artifacts to disk.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace flowlab {

/// Exit statuses of run().
enum ExitCode : int { kExitOk = 0, kExitInvariant = 1, kExitUsage = 2, kExitCatalog = 3 };

struct RunConfig {
  std::string command;  ///< flow | good | cover | equi

  // flow, equi
  std::string map;
  std::vector<std::string> lambda;  ///< "p/q" texts; empty means the catalog default

  // equi
  std::vector<double> T;  ///< T list, or T2 list with bcondition
  bool bcondition = false;
  std::vector<double> J_lower, J_upper;  ///< empty means [0,1]^k
  std::vector<std::string> observables = {"siegel:indicator:1"};
  std::size_t grid = 256;
  std::vector<double> eps0 = {0.1, 0.05};
  std::string sampling = "grid";  ///< grid | mc
  std::size_t samples = 100000;
  std::uint64_t seed = 1;

  // good
  std::string poly;
  std::vector<double> lower, upper;
  double delta_lo = 1e-3;  ///< deltas as fractions of sup |f| on the box
  double delta_hi = 1.0;
  std::size_t delta_count = 40;
  std::string alpha;  ///< empty means 1 / (k deg)
  std::optional<double> C;

  // cover
  std::size_t k = 2;
  std::size_t count = 100;
  double width_min = 0.02;
  double width_max = 0.25;
  std::size_t bound = 0;  ///< 0 means 2^k + 1

  // not part of the content hash
  int workers = 0;
  std::string out_dir;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Full serialization, two-space indented, keys sorted.
std::string to_json(const RunConfig& config);
/// Missing keys keep their defaults; unknown keys and wrong types throw ParseError.
RunConfig config_from_json(const std::string& text);

/// SHA-256 hex of the serialized config with workers and out_dir cleared.
std::string content_hash(const RunConfig& config);

/// --out flag, else FLOWLAB_OUT, else ./flowlab_out.
std::filesystem::path resolve_out_dir(const RunConfig& config);

/// Runs one subcommand, printing a summary to `out` and writing artifacts
/// under resolve_out_dir(config) / "<command>-<hash12>".
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace flowlab
