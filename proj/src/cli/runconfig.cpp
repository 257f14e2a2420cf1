#include "flowlab/runconfig.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <ostream>
#include <random>
#include <sstream>

#include "flowlab/catalog.hpp"
#include "flowlab/error.hpp"
#include "flowlab/experiment.hpp"
#include "flowlab/flowlimit.hpp"
#include "flowlab/goodness.hpp"
#include "flowlab/parallel.hpp"

namespace flowlab {

using nlohmann::json;

// ------------------------------------------------------------ serialization

namespace {

json as_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["map"] = c.map;
  j["lambda"] = c.lambda;
  j["T"] = c.T;
  j["bcondition"] = c.bcondition;
  j["J_lower"] = c.J_lower;
  j["J_upper"] = c.J_upper;
  j["observables"] = c.observables;
  j["grid"] = c.grid;
  j["eps0"] = c.eps0;
  j["sampling"] = c.sampling;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["poly"] = c.poly;
  j["lower"] = c.lower;
  j["upper"] = c.upper;
  j["delta_lo"] = c.delta_lo;
  j["delta_hi"] = c.delta_hi;
  j["delta_count"] = c.delta_count;
  j["alpha"] = c.alpha;
  j["C"] = c.C ? json(*c.C) : json(nullptr);
  j["k"] = c.k;
  j["count"] = c.count;
  j["width_min"] = c.width_min;
  j["width_max"] = c.width_max;
  j["bound"] = c.bound;
  j["workers"] = c.workers;
  j["out_dir"] = c.out_dir;
  return j;
}

template <class T>
void read(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw InvariantError("content_hash: SHA-256 failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return out.str();
}

RunConfig hashable(RunConfig c) {
  c.workers = 0;
  c.out_dir.clear();
  return c;
}

}  // namespace

std::string to_json(const RunConfig& config) { return as_json(config).dump(2) + "\n"; }

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config: top level must be an object");
  const json known = as_json(RunConfig{});
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ParseError("config: unknown key '" + key + "'");
  }
  RunConfig c;
  try {
    read(j, "command", c.command);
    read(j, "map", c.map);
    read(j, "lambda", c.lambda);
    read(j, "T", c.T);
    read(j, "bcondition", c.bcondition);
    read(j, "J_lower", c.J_lower);
    read(j, "J_upper", c.J_upper);
    read(j, "observables", c.observables);
    read(j, "grid", c.grid);
    read(j, "eps0", c.eps0);
    read(j, "sampling", c.sampling);
    read(j, "samples", c.samples);
    read(j, "seed", c.seed);
    read(j, "poly", c.poly);
    read(j, "lower", c.lower);
    read(j, "upper", c.upper);
    read(j, "delta_lo", c.delta_lo);
    read(j, "delta_hi", c.delta_hi);
    read(j, "delta_count", c.delta_count);
    read(j, "alpha", c.alpha);
    if (j.contains("C") && !j.at("C").is_null()) c.C = j.at("C").get<double>();
    read(j, "k", c.k);
    read(j, "count", c.count);
    read(j, "width_min", c.width_min);
    read(j, "width_max", c.width_max);
    read(j, "bound", c.bound);
    read(j, "workers", c.workers);
    read(j, "out_dir", c.out_dir);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return c;
}

std::string content_hash(const RunConfig& config) { return sha256_hex(to_json(hashable(config))); }

std::filesystem::path resolve_out_dir(const RunConfig& config) {
  if (!config.out_dir.empty()) return config.out_dir;
  if (const char* env = std::getenv("FLOWLAB_OUT"); env && *env) return env;
  return "flowlab_out";
}

// ------------------------------------------------------------ subcommands

namespace {

struct Artifacts {
  std::filesystem::path dir;
  std::string hash;
  std::uint64_t seed;
  mutable std::vector<std::pair<std::string, std::string>> files;

  void write(const std::string& name, const std::string& content) const {
    files.emplace_back(name, content);
  }
  void flush() const {
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : files) {
      std::ofstream f(dir / name, std::ios::binary);
      f << content;
      if (!f) throw PreconditionError("cannot write " + (dir / name).string());
    }
  }
  std::string stamp() const {
    return "config_sha256 = " + hash + "\nseed = " + std::to_string(seed) + "\n";
  }
  // Appends the config hash (and the seed when absent) to every CSV row.
  std::string stamp_csv(const std::string& csv) const {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    bool header = true, has_seed = false;
    while (std::getline(in, line)) {
      if (header) {
        has_seed = ("," + line + ",").find(",seed,") != std::string::npos;
        out << line << (has_seed ? "" : ",seed") << ",config_sha256\n";
        header = false;
      } else {
        out << line << (has_seed ? "" : "," + std::to_string(seed)) << ',' << hash << '\n';
      }
    }
    return out.str();
  }
};

std::vector<Exponent> parse_lambda(const std::vector<std::string>& texts) {
  std::vector<Exponent> out;
  for (const auto& t : texts) out.push_back(parse_exponent(t));
  return out;
}

std::string join_exponents(const std::vector<Exponent>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + exponent_to_string(v[i]);
  return s;
}

std::vector<std::string> matrix_strings(const std::vector<PolyMatrix>& ms) {
  std::vector<std::string> out;
  for (const auto& m : ms) out.push_back(m.to_string());
  return out;
}

int run_flow(const RunConfig& c, const Artifacts& a, std::ostream& out) {
  const Catalog cat = Catalog::load(default_catalog_path());
  const CatalogEntry& e = cat.at(c.map);
  const auto lambda = c.lambda.empty() ? e.lambda : parse_lambda(c.lambda);
  if (lambda.size() != e.k()) {
    throw PreconditionError("flow: map '" + e.id + "' needs " + std::to_string(e.k()) +
                            " exponents");
  }
  const PreparedFlow pf = prepare_flow(e.theta, lambda);
  const GroupLawReport rep = group_law_check(pf.flow, 50, c.seed);

  std::ostringstream text;
  text << "map = " << e.id << "\n";
  text << "theta = " << e.theta.to_string() << "\n";
  text << "lambda = " << join_exponents(lambda) << "\n";
  text << "scale = " << exponent_to_string(pf.normalization.scale) << "\n";
  text << describe(pf.flow);
  text << "group_law = " << (rep.passed() ? "PASS" : "FAIL") << "\n";
  for (const auto& f : rep.failures) text << "  " << f << "\n";

  json j;
  j["map"] = e.id;
  j["lambda"] = join_exponents(lambda);
  j["scale"] = exponent_to_string(pf.normalization.scale);
  j["q"] = exponent_to_string(pf.flow.q);
  j["d"] = pf.flow.d;
  j["limits"] = matrix_strings(pf.flow.limits);
  j["generator"] = pf.flow.generator.to_string();
  j["rho"] = flow_of(pf.flow).to_string();
  j["group_law"] = rep.passed();
  j["config_sha256"] = a.hash;
  j["seed"] = a.seed;

  if (e.k() == 2) {
    try {
      const TwoDimFlowResult tw = twodim_flow(e.theta);
      text << "[two-variable]\n" << describe(tw);
      j["twodim"] = {{"q", exponent_to_string(tw.q)},
                     {"d", tw.d},
                     {"p", tw.p},
                     {"b", exponent_to_string(tw.b)},
                     {"rho", tw.rho.to_string()}};
    } catch (const PreconditionError& ex) {
      text << "[two-variable]\nnot applicable: " << ex.what() << "\n";
    }
  }
  out << text.str();
  a.write("flow.txt", a.stamp() + text.str());
  a.write("flow.json", j.dump(2) + "\n");
  return rep.passed() ? kExitOk : kExitInvariant;
}

int total_degree(const GenPoly& p) {
  Exponent best(0);
  for (const auto& [m, coef] : p.terms()) {
    Exponent sum(0);
    for (std::size_t i = 0; i < 3; ++i) sum += m[coordinate_var(i)];
    best = std::max(best, sum);
  }
  if (best.denominator() != 1) throw PreconditionError("good: polynomial needs integer exponents");
  return static_cast<int>(best.numerator());
}

int run_good(const RunConfig& c, const Artifacts& a, std::ostream& out) {
  if (c.poly.empty()) throw PreconditionError("good: --poly is required");
  const GenPoly p = GenPoly::parse(c.poly);
  std::size_t k = c.lower.size();
  if (k == 0) {
    for (std::size_t i = 0; i < 3; ++i) {
      if (p.depends_on(coordinate_var(i))) k = i + 1;
    }
    k = std::max<std::size_t>(k, 1);
  }
  const BoxRegion box = c.lower.empty() ? BoxRegion::unit(k) : BoxRegion(c.lower, c.upper);
  if (box.dim() > 3) throw PreconditionError("good: at most three coordinates");
  const auto f = polynomial_field(p, box.dim());
  const int deg = total_degree(p);
  if (deg == 0) throw PreconditionError("good: polynomial is constant");
  const Exponent alpha = c.alpha.empty()
                             ? Exponent(1, static_cast<std::int64_t>(box.dim()) * deg)
                             : parse_exponent(c.alpha);
  const double a_num =
      static_cast<double>(alpha.numerator()) / static_cast<double>(alpha.denominator());

  const SublevelProfile profile(f, box, c.grid);
  const auto train = log_grid(c.delta_lo * profile.sup(), c.delta_hi * profile.sup(), c.delta_count);
  const auto test = geometric_midpoints(train);
  GoodCertificate cert;
  if (c.C) {
    cert.C = *c.C;
    cert.alpha = alpha;
    cert.sup = profile.sup();
    cert.slack = profile.slack();
    cert.delta_grid = test;
    for (double d : test) {
      const GoodCheck g = good_inequality_check(profile, d, cert.C, a_num);
      cert.lhs.push_back(g.lhs);
      cert.rhs.push_back(g.rhs);
      cert.holds.push_back(g.holds);
      cert.violations += !g.holds;
    }
  } else {
    cert = certify_good(f, box, alpha, train, test, c.grid);
  }

  std::ostringstream csv;
  csv << "delta,lhs,rhs,holds\n";
  for (std::size_t i = 0; i < cert.delta_grid.size(); ++i) {
    csv << numeric::format_double(cert.delta_grid[i]) << ',' << numeric::format_double(cert.lhs[i])
        << ',' << numeric::format_double(cert.rhs[i]) << ',' << (cert.holds[i] ? 1 : 0) << '\n';
  }
  std::ostringstream summary;
  summary << "poly = " << p.to_string() << "\n";
  summary << "alpha = " << exponent_to_string(alpha) << "\n";
  summary << "C = " << numeric::format_double(cert.C) << (c.C ? " (given)" : " (fitted)") << "\n";
  summary << "sup = " << numeric::format_double(cert.sup) << "\n";
  summary << "slack = " << numeric::format_double(cert.slack) << "\n";
  summary << "held_out = " << cert.delta_grid.size() << "\n";
  summary << "violations = " << cert.violations << "\n";
  out << summary.str();
  a.write("good.txt", a.stamp() + summary.str());
  a.write("good.csv", a.stamp_csv(csv.str()));
  return cert.violations == 0 ? kExitOk : kExitInvariant;
}

int run_cover(const RunConfig& c, const Artifacts& a, std::ostream& out) {
  if (c.k < 1 || c.k > 3) throw PreconditionError("cover: k must be 1, 2 or 3");
  if (!(c.width_min > 0) || !(c.width_max >= c.width_min)) {
    throw PreconditionError("cover: need 0 < width_min <= width_max");
  }
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> pos(0.0, 1.0), width(c.width_min, c.width_max);
  std::vector<std::vector<double>> centers(c.count, std::vector<double>(c.k));
  std::vector<double> widths(c.count);
  for (std::size_t i = 0; i < c.count; ++i) {
    for (auto& x : centers[i]) x = pos(rng);
    widths[i] = width(rng);
  }
  const CubeCover cover = besicovitch_select(centers, widths, c.bound);

  std::ostringstream report;
  report << "k = " << c.k << "\n";
  report << "cubes = " << c.count << "\n";
  report << "selected = " << cover.selected.size() << "\n";
  report << "covers_all = " << (cover.covers_all ? "true" : "false") << "\n";
  report << "max_multiplicity = " << cover.max_multiplicity << "\n";
  report << "bound = " << cover.bound << "\n";
  report << "probe_points = " << cover.probe_points << "\n";
  report << "histogram =";
  for (std::size_t m = 0; m < cover.histogram.size(); ++m) report << ' ' << cover.histogram[m];
  report << "\n";

  std::ostringstream csv;
  csv << "index";
  for (std::size_t i = 0; i < c.k; ++i) csv << ",c" << i + 1;
  csv << ",half_width\n";
  for (std::size_t s = 0; s < cover.selected.size(); ++s) {
    csv << cover.selected[s];
    for (double x : cover.cubes[s].center) csv << ',' << numeric::format_double(x);
    csv << ',' << numeric::format_double(cover.cubes[s].half_width) << '\n';
  }
  out << report.str();
  a.write("cover.txt", a.stamp() + report.str());
  a.write("cover.csv", a.stamp_csv(csv.str()));
  return cover.covers_all && cover.within_bound() ? kExitOk : kExitInvariant;
}

int run_equi(const RunConfig& c, const Artifacts& a, std::ostream& out) {
  const Catalog cat = Catalog::load(default_catalog_path());
  const CatalogEntry& e = cat.at(c.map);
  if (c.T.empty()) throw PreconditionError("equi: --T is required");
  std::vector<TestFunction> obs;
  for (const auto& o : c.observables) obs.push_back(TestFunction::parse(o));

  SweepOptions opt;
  opt.grid = c.grid;
  opt.eps0s = c.eps0;
  if (c.sampling == "mc") {
    opt.sampling = Sampling::monte_carlo;
  } else if (c.sampling != "grid") {
    throw PreconditionError("equi: sampling must be 'grid' or 'mc'");
  }
  opt.samples = c.samples;
  opt.seed = c.seed;
  opt.map_id = e.id;

  ExperimentResult result;
  if (c.bcondition) {
    if (e.k() != 2 || !e.b) throw PreconditionError("equi: map '" + e.id + "' has no b exponent");
    result = twodim_bcondition_sweep(e.theta, *e.b, c.T, obs, opt);
  } else {
    const auto lambda = c.lambda.empty() ? e.lambda : parse_lambda(c.lambda);
    if (e.closed_orbit && e.period) opt.closed_orbit_period = *e.period;
    const BoxRegion J =
        c.J_lower.empty() ? BoxRegion::unit(lambda.size()) : BoxRegion(c.J_lower, c.J_upper);
    result = convergence_sweep(e.theta, lambda, c.T, obs, J, opt);
  }

  bool sane = true;
  std::ostringstream table;
  table << std::left << std::setw(12) << "T" << std::setw(24) << "observable" << std::setw(14)
        << "average" << std::setw(14) << "reference" << "gap\n";
  for (const auto& row : result.rows) {
    sane = sane && std::isfinite(row.average);
    for (double f : row.compact_fraction) sane = sane && f >= 0.0 && f <= 1.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-12g%-24s%-14.6f%-14.6f%.4f%%\n", row.T,
                  row.observable.c_str(), row.average, row.reference, 100.0 * row.gap);
    table << buf;
  }
  out << table.str();
  a.write("results.csv", a.stamp_csv(result.to_csv()));
  a.write("plot.csv", a.stamp_csv(result.plot_data()));
  return sane ? kExitOk : kExitInvariant;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  static const char* const commands[] = {"flow", "good", "cover", "equi"};
  if (std::find(std::begin(commands), std::end(commands), config.command) == std::end(commands)) {
    err << "unknown command '" << config.command << "' (expected flow, good, cover or equi)\n";
    return kExitUsage;
  }
  try {
    set_workers(config.workers);
    Artifacts a;
    a.hash = content_hash(config);
    a.seed = config.seed;
    a.dir = resolve_out_dir(config) / (config.command + "-" + a.hash.substr(0, 12));
    a.write("config.json", to_json(hashable(config)));
    a.write("config.sha256", a.hash + "  config.json\n");

    int status = kExitOk;
    if (config.command == "flow") status = run_flow(config, a, out);
    if (config.command == "good") status = run_good(config, a, out);
    if (config.command == "cover") status = run_cover(config, a, out);
    if (config.command == "equi") status = run_equi(config, a, out);
    a.flush();
    out << "artifacts: " << a.dir.string() << "\n";
    out << "config_sha256: " << a.hash << "\n";
    set_workers(0);
    if (status != kExitOk) err << config.command << ": invariant check failed\n";
    return status;
  } catch (const CatalogError& e) {
    err << "catalog error: " << e.what() << "\n";
    return kExitCatalog;
  } catch (const CuspError& e) {
    err << "invariant failure: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const InvariantError& e) {
    err << "invariant failure: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const Error& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "output error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace flowlab
