#pragma once

// Named polynomial maps into SL_N with the metadata the experiments need.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flowlab/genpoly.hpp"
#include "flowlab/goodness.hpp"
#include "flowlab/polymatrix.hpp"

namespace flowlab {

/// Linearization setup around v0 for relative_size_check.
struct RelativeSizeScenario {
  std::string name;
  std::vector<double> v0;
  GenPoly polynomial;  ///< in v1..vN
  BoxRegion box;
  double r = 1.0;      ///< radius of D
  double c = 1.0;      ///< goodness constant
  int nk = 1;          ///< Besicovitch multiplicity constant
  int m = 1;           ///< degree of the polynomial in v
  int l = 1;           ///< degree of the map
  double beta = 0.5;
  std::size_t grid = 512;
};

struct CatalogEntry {
  std::string id;
  std::string description;
  PolyMatrix theta;
  std::size_t n = 2;
  bool sl = true;
  bool product = false;       ///< factors in x, y, ... multiply left to right
  bool closed_orbit = false;  ///< reference is the one-period average
  std::optional<double> period;
  std::vector<Exponent> lambda;               ///< default box exponents
  std::vector<std::vector<Rational>> alphas;  ///< sample points for residual checks
  std::optional<Exponent> b;                  ///< b-condition exponent (k = 2)
  std::vector<RelativeSizeScenario> scenarios;
  bool semisimple_hull = false;               ///< asserted by the catalog, not verified

  std::size_t k() const { return lambda.size(); }
};

class Catalog {
 public:
  /// Throws CatalogError on unreadable files, bad JSON or invalid entries.
  static Catalog load(const std::filesystem::path& path);
  static Catalog parse(std::string_view json_text);

  const std::vector<CatalogEntry>& entries() const { return entries_; }
  /// Throws CatalogError for an unknown id.
  const CatalogEntry& at(std::string_view id) const;
  bool contains(std::string_view id) const;

 private:
  std::vector<CatalogEntry> entries_;
};

/// FLOWLAB_CATALOG if set, else the data file of the source tree.
std::filesystem::path default_catalog_path();

}  // namespace flowlab
