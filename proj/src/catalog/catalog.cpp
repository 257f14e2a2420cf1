#include "flowlab/catalog.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "flowlab/error.hpp"

#ifndef FLOWLAB_SOURCE_DIR
#define FLOWLAB_SOURCE_DIR "."
#endif

namespace flowlab {
namespace {

using nlohmann::json;

Exponent exponent_field(const json& j) {
  if (j.is_number_integer()) return Exponent(j.get<std::int64_t>());
  if (j.is_string()) return parse_exponent(j.get<std::string>());
  throw CatalogError("exponent must be an integer or a \"p/q\" string");
}

Rational rational_field(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) {
    Rational r(j.get<std::string>());
    r.canonicalize();
    return r;
  }
  throw CatalogError("alpha coordinates must be integers or \"p/q\" strings");
}

std::vector<double> doubles(const json& j) {
  std::vector<double> out;
  for (const auto& v : j) out.push_back(v.get<double>());
  return out;
}

RelativeSizeScenario parse_scenario(const json& j, std::size_t n) {
  RelativeSizeScenario s;
  s.name = j.at("name").get<std::string>();
  s.v0 = doubles(j.at("v0"));
  if (s.v0.size() != n) throw CatalogError("scenario " + s.name + ": v0 has wrong length");
  s.polynomial = GenPoly::parse(j.at("P").get<std::string>());
  s.box = BoxRegion(doubles(j.at("box").at(0)), doubles(j.at("box").at(1)));
  s.r = j.value("r", 1.0);
  s.c = j.value("c", 1.0);
  s.nk = j.value("nk", 1);
  s.m = j.value("m", 1);
  s.l = j.value("l", 1);
  s.beta = j.value("beta", 0.5);
  s.grid = j.value("grid", std::size_t{512});
  return s;
}

CatalogEntry parse_entry(const json& j) {
  CatalogEntry e;
  e.id = j.at("id").get<std::string>();
  try {
    e.description = j.value("description", std::string{});
    e.theta = PolyMatrix::parse(j.at("matrix").get<std::string>());
    e.n = j.at("N").get<std::size_t>();
    e.sl = j.value("sl", true);
    e.product = j.value("product", false);
    e.closed_orbit = j.value("closed_orbit", false);
    if (j.contains("period")) e.period = j.at("period").get<double>();
    for (const auto& l : j.at("lambda")) e.lambda.push_back(exponent_field(l));
    for (const auto& a : j.value("alphas", json::array())) {
      std::vector<Rational> point;
      for (const auto& c : a) point.push_back(rational_field(c));
      if (point.size() != e.lambda.size()) throw CatalogError("alpha point has wrong length");
      e.alphas.push_back(std::move(point));
    }
    if (j.contains("b")) e.b = exponent_field(j.at("b"));
    for (const auto& s : j.value("scenarios", json::array())) {
      e.scenarios.push_back(parse_scenario(s, e.n));
    }
    e.semisimple_hull = j.value("semisimple_hull", false);
  } catch (const CatalogError& err) {
    throw CatalogError("map " + e.id + ": " + err.what());
  } catch (const json::exception& err) {
    throw CatalogError("map " + e.id + ": " + err.what());
  } catch (const Error& err) {
    throw CatalogError("map " + e.id + ": " + err.what());
  }

  if (e.theta.dim() != e.n) throw CatalogError("map " + e.id + ": N does not match the matrix");
  if (e.lambda.empty() || e.lambda.size() > 3) {
    throw CatalogError("map " + e.id + ": lambda must have 1 to 3 entries");
  }
  for (const auto& l : e.lambda) {
    if (l <= 0) throw CatalogError("map " + e.id + ": lambda entries must be positive");
  }
  const Var coords[] = {Var::x, Var::y, Var::z};
  for (std::size_t i = e.lambda.size(); i < 3; ++i) {
    if (e.theta.depends_on(coords[i])) {
      throw CatalogError("map " + e.id + ": matrix uses more coordinates than lambda");
    }
  }
  if (!evaluate_exact(e.theta, {{Var::x, 0}, {Var::y, 0}, {Var::z, 0}}).is_identity()) {
    throw CatalogError("map " + e.id + ": Theta(0) is not the identity");
  }
  if (e.sl && !(determinant(e.theta) == GenPoly(1))) {
    throw CatalogError("map " + e.id + ": determinant is not identically 1");
  }
  if (e.closed_orbit && !e.period) {
    throw CatalogError("map " + e.id + ": closed_orbit requires a period");
  }
  return e;
}

}  // namespace

Catalog Catalog::parse(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& err) {
    throw CatalogError(std::string("catalog is not valid JSON: ") + err.what());
  }
  if (!doc.contains("maps") || !doc.at("maps").is_array()) {
    throw CatalogError("catalog must hold a \"maps\" array");
  }
  Catalog out;
  std::set<std::string> seen;
  for (const auto& j : doc.at("maps")) {
    if (!j.contains("id")) throw CatalogError("catalog entry without id");
    CatalogEntry e = parse_entry(j);
    if (!seen.insert(e.id).second) throw CatalogError("duplicate map id " + e.id);
    out.entries_.push_back(std::move(e));
  }
  return out;
}

Catalog Catalog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CatalogError("cannot open catalog " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const CatalogEntry& Catalog::at(std::string_view id) const {
  for (const auto& e : entries_) {
    if (e.id == id) return e;
  }
  throw CatalogError("unknown map " + std::string(id));
}

bool Catalog::contains(std::string_view id) const {
  for (const auto& e : entries_) {
    if (e.id == id) return true;
  }
  return false;
}

std::filesystem::path default_catalog_path() {
  if (const char* env = std::getenv("FLOWLAB_CATALOG"); env && *env) return env;
  return std::filesystem::path(FLOWLAB_SOURCE_DIR) / "data" / "catalog.json";
}

}  // namespace flowlab
