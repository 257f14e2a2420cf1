#pragma once

// Measure-growth toolkit: (C, alpha)-good checks on boxes, the sup-extension
// bound, greedy Besicovitch cube selection, and the relative-size
// neighborhoods built around a polynomial variety.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "flowlab/genpoly.hpp"
#include "flowlab/polymatrix.hpp"

namespace flowlab {

struct BoxRegion {
  std::vector<double> lower;
  std::vector<double> upper;

  BoxRegion() = default;
  /// Throws DomainError unless lower < upper componentwise and k >= 1.
  BoxRegion(std::vector<double> lo, std::vector<double> hi);
  static BoxRegion unit(std::size_t k);

  std::size_t dim() const { return lower.size(); }
  double volume() const;
  double side(std::size_t i) const { return upper[i] - lower[i]; }
  bool contains(std::span<const double> x) const;
};

using ScalarField = std::function<double(std::span<const double>)>;

/// Polynomial in the coordinates x, y, z (first k of them) as a ScalarField.
ScalarField polynomial_field(const GenPoly& p, std::size_t k);

enum class GridKind { midpoint, corner };

/// Number of grid points for `grid` per axis in k dimensions.
std::size_t grid_points(std::size_t k, std::size_t grid);

/// Coordinates of the i-th point of the tensor grid (row-major, last axis fastest).
void grid_point(const BoxRegion& box, std::size_t grid, GridKind kind, std::size_t index,
                std::span<double> out);

/// f at every grid point, in grid order (OpenMP).
std::vector<double> grid_values(const ScalarField& f, const BoxRegion& box, std::size_t grid,
                                GridKind kind);

/// max |f| over the corner-inclusive tensor grid; grid >= 2.
double sup_norm(const ScalarField& f, const BoxRegion& box, std::size_t grid);

/// Sorted |f| on the midpoint grid: any sublevel measure becomes a binary search.
class SublevelProfile {
 public:
  SublevelProfile(const ScalarField& f, const BoxRegion& box, std::size_t grid);
  SublevelProfile(std::vector<double> abs_values, const BoxRegion& box, std::size_t grid,
                  double sup);

  /// Midpoint-grid estimate of |{x in B : |f(x)| < delta}|.
  double measure_below(double delta) const;
  double sup() const { return sup_; }
  double volume() const { return volume_; }
  std::size_t dim() const { return dim_; }
  std::size_t grid() const { return grid_; }
  /// Grid slack: 2k/grid times |B| is added to the right-hand side.
  double slack() const { return 2.0 * static_cast<double>(dim_) / static_cast<double>(grid_); }

 private:
  std::vector<double> sorted_;
  double volume_ = 0.0;
  double sup_ = 0.0;
  std::size_t dim_ = 0;
  std::size_t grid_ = 0;
};

struct GoodCheck {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// |{|f| < delta}| <= C (delta / ||f||_B)^alpha |B| up to the grid slack.
/// Throws DomainError when ||f||_B = 0, PreconditionError unless delta > 0 and C >= 1.
GoodCheck good_inequality_check(const ScalarField& f, const BoxRegion& box, double delta, double C,
                                double alpha, std::size_t grid);
GoodCheck good_inequality_check(const SublevelProfile& profile, double delta, double C,
                                double alpha);

/// max(1, max_delta lhs / ((delta / ||f||)^alpha |B|)).
double fit_min_C(const ScalarField& f, const BoxRegion& box, double alpha,
                 std::span<const double> delta_grid, std::size_t grid);
double fit_min_C(const SublevelProfile& profile, double alpha, std::span<const double> delta_grid);

/// `count` log-spaced values in [lo, hi] and their geometric midpoints.
std::vector<double> log_grid(double lo, double hi, std::size_t count);
std::vector<double> geometric_midpoints(std::span<const double> grid);

struct GoodCertificate {
  double C = 1.0;
  Exponent alpha;
  double sup = 0.0;
  double slack = 0.0;
  std::vector<double> delta_grid;  ///< held-out deltas
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<bool> holds;
  std::size_t violations = 0;
};

/// Fits C on `train`, then checks the inequality on `test`. C covers every
/// delta between the smallest and largest training value, not only the nodes.
GoodCertificate certify_good(const ScalarField& f, const BoxRegion& box, const Exponent& alpha,
                             std::span<const double> train, std::span<const double> test,
                             std::size_t grid);

struct SupExtension {
  double r_prime = 0.0;
  double sup_e = 0.0;
  double sup_e_prime = 0.0;
  bool verified = false;  ///< sup_E |P| < R'
};

/// R' = C^(1/alpha) R |E|^(1/alpha) / |E'|^(1/alpha). Throws PreconditionError
/// when E' is not inside E or sup_{E'} |P| >= R on the grid.
SupExtension sup_extension(const ScalarField& p, const BoxRegion& e, const BoxRegion& e_prime,
                           double R, double C, double alpha, std::size_t grid);

// ------------------------------------------------------------ covering

struct Cube {
  std::vector<double> center;
  double half_width = 0.0;

  bool contains(std::span<const double> x) const;  ///< closed cube
};

struct CubeCover {
  std::vector<std::size_t> selected;  ///< input indices in selection order
  std::vector<Cube> cubes;
  bool covers_all = false;
  std::size_t max_multiplicity = 0;
  std::vector<std::size_t> histogram;  ///< histogram[m] = probe points of multiplicity m
  std::size_t probe_points = 0;
  std::size_t bound = 0;  ///< configured N_k
  bool within_bound() const { return max_multiplicity <= bound; }
};

/// Default bound 2^k + 1.
std::size_t default_besicovitch_bound(std::size_t k);

/// Greedy by decreasing half-width (ties by input order); a cube is admitted
/// when its center is outside every cube selected so far. Multiplicity is
/// measured exactly on the arrangement grid spanned by the selected cubes'
/// lower faces, where the depth of closed boxes attains its maximum.
CubeCover besicovitch_select(const std::vector<std::vector<double>>& centers,
                             std::span<const double> half_widths, std::size_t bound = 0);

// ------------------------------------------------------------ relative size

struct Neighborhood {
  double radius = 0.0;  ///< ||v|| < radius
  double level = 0.0;   ///< |P(v)| < level
};

struct RelativeSizeParams {
  double alpha = 0.0;
  double delta = 0.0;
  double d_radius = 0.0;
  Neighborhood phi;
  Neighborhood psi;
};

/// alpha = 1 / (2 m l k).
double relative_size_alpha(int m, int l, int k);

/// delta = (eps / (c N_k))^(1/alpha), D radius r / sqrt(delta),
/// Phi = {||v|| < (r + beta)/sqrt(delta), |P| < beta}, Psi = {||v|| < r + beta, |P| < beta delta}.
/// Throws PreconditionError unless 0 < eps < 1 and r, c, beta, alpha > 0.
RelativeSizeParams relative_size_neighborhoods(double r, double eps, double c, int nk, double alpha,
                                               double beta);
RelativeSizeParams relative_size_neighborhoods(double r, double eps, double c, int nk, int m, int l,
                                               int k, double beta);

enum class RelativeSizeStatus { holds, fails, vacuous };
std::string to_string(RelativeSizeStatus status);

struct RelativeSizeResult {
  RelativeSizeStatus status = RelativeSizeStatus::vacuous;
  double lhs = 0.0;  ///< |{x in B : Theta(x) v0 in Psi}|
  double rhs = 0.0;  ///< eps |{x in B : Theta(x) v0 in Phi}|
  std::size_t outside_phi = 0;
};

/// P is a polynomial in the vector variables v1..vN. Grid is per axis over B.
RelativeSizeResult relative_size_check(const PolyMatrix& theta_map, std::span<const double> v0,
                                       const BoxRegion& box, const GenPoly& p,
                                       const Neighborhood& psi, const Neighborhood& phi,
                                       double eps, std::size_t grid);

namespace reference {

/// Serial counterparts of the grid kernels, kept as test oracles.
std::vector<double> grid_values(const ScalarField& f, const BoxRegion& box, std::size_t grid,
                                GridKind kind);
double sublevel_measure(const ScalarField& f, const BoxRegion& box, std::size_t grid,
                        double delta);

}  // namespace reference

}  // namespace flowlab
