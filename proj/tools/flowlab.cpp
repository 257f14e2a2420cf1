// flowlab: flow | good | cover | equi front end.

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "flowlab/error.hpp"
#include "flowlab/runconfig.hpp"

using namespace flowlab;

namespace {

// Flags write into `given`; only flags present on the command line are copied
// over the config file afterwards.
struct Binder {
  RunConfig given;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters;

  template <class T>
  CLI::Option* bind(CLI::App* app, const std::string& name, T RunConfig::*field,
                    const std::string& help) {
    CLI::Option* opt = app->add_option(name, given.*field, help);
    setters.emplace_back(opt, [this, field](RunConfig& c) { c.*field = given.*field; });
    return opt;
  }
  void apply(RunConfig& c) const {
    for (const auto& [opt, set] : setters) {
      if (opt->count() > 0) set(c);
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Limiting flows, goodness checks and equidistribution sweeps"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  Binder b;
  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration");
  b.bind(&app, "--out", &RunConfig::out_dir, "output directory (default $FLOWLAB_OUT or ./flowlab_out)");
  b.bind(&app, "--workers", &RunConfig::workers, "OpenMP workers (0 = runtime default)");
  b.bind(&app, "--seed", &RunConfig::seed, "master seed");

  auto* flow = app.add_subcommand("flow", "limiting flow of a catalog map");
  b.bind(flow, "--map", &RunConfig::map, "catalog id");
  b.bind(flow, "--lambda", &RunConfig::lambda, "box exponents p/q,...")->delimiter(',');

  auto* good = app.add_subcommand("good", "(C, alpha)-good certificate of a polynomial");
  b.bind(good, "--poly", &RunConfig::poly, "polynomial in x, y, z");
  b.bind(good, "--lower", &RunConfig::lower, "box lower corner")->delimiter(',');
  b.bind(good, "--upper", &RunConfig::upper, "box upper corner")->delimiter(',');
  b.bind(good, "--alpha", &RunConfig::alpha, "exponent p/q (default 1/(k deg))");
  b.bind(good, "--C", &RunConfig::C, "fixed constant instead of a fitted one");
  b.bind(good, "--delta-lo", &RunConfig::delta_lo, "smallest delta / sup|f|");
  b.bind(good, "--delta-hi", &RunConfig::delta_hi, "largest delta / sup|f|");
  b.bind(good, "--delta-count", &RunConfig::delta_count, "training deltas");
  b.bind(good, "--grid", &RunConfig::grid, "points per axis");

  auto* cover = app.add_subcommand("cover", "greedy Besicovitch selection on random cubes");
  b.bind(cover, "--k", &RunConfig::k, "dimension (1..3)");
  b.bind(cover, "--count", &RunConfig::count, "number of cubes");
  b.bind(cover, "--width-min", &RunConfig::width_min, "smallest half-width");
  b.bind(cover, "--width-max", &RunConfig::width_max, "largest half-width");
  b.bind(cover, "--bound", &RunConfig::bound, "multiplicity bound (default 2^k+1)");

  auto* equi = app.add_subcommand("equi", "Birkhoff averages over expanding boxes");
  b.bind(equi, "--map", &RunConfig::map, "catalog id");
  b.bind(equi, "--lambda", &RunConfig::lambda, "box exponents p/q,...")->delimiter(',');
  b.bind(equi, "--T", &RunConfig::T, "T list (T2 list with --bcondition)")->delimiter(',');
  b.bind(equi, "--bcondition", &RunConfig::bcondition, "boxes [0, 1.01 T2^b] x [0, T2]");
  b.bind(equi, "--J-lower", &RunConfig::J_lower, "subbox lower corner in [0,1]^k")->delimiter(',');
  b.bind(equi, "--J-upper", &RunConfig::J_upper, "subbox upper corner in [0,1]^k")->delimiter(',');
  b.bind(equi, "--obs", &RunConfig::observables, "siegel:indicator:R | siegel:bump:R")
      ->delimiter(',');
  b.bind(equi, "--grid", &RunConfig::grid, "points per axis");
  b.bind(equi, "--eps0", &RunConfig::eps0, "compactness thresholds")->delimiter(',');
  b.bind(equi, "--sampling", &RunConfig::sampling, "grid | mc");
  b.bind(equi, "--samples", &RunConfig::samples, "Monte Carlo samples per box");

  if (argc <= 1) {
    std::cerr << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  RunConfig config;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot read config " << config_path << "\n";
      return kExitUsage;
    }
    std::stringstream text;
    text << in.rdbuf();
    try {
      config = config_from_json(text.str());
    } catch (const Error& e) {
      std::cerr << e.what() << "\n";
      return kExitUsage;
    }
  }
  b.apply(config);
  for (auto* sub : app.get_subcommands()) config.command = sub->get_name();
  if (config.command.empty()) {
    std::cerr << app.help();
    return kExitUsage;
  }
  return run(config, std::cout, std::cerr);
}
