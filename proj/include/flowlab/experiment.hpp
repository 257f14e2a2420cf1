#pragma once

// Birkhoff averages of Siegel observables along polynomial trajectories over
// expanding boxes, nondivergence fractions, and the sweep tables built from them.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flowlab/genpoly.hpp"
#include "flowlab/goodness.hpp"
#include "flowlab/homspace.hpp"
#include "flowlab/polymatrix.hpp"

namespace flowlab {

enum class Sampling { midpoint_grid, monte_carlo };

struct BoxSpec {
  std::vector<Exponent> lambda;
  double T = 1.0;
  BoxRegion J;                 ///< inside [0,1]^k; empty means the full cube
  std::size_t grid = 64;       ///< samples per axis (grid mode)
  Sampling sampling = Sampling::midpoint_grid;
  std::size_t samples = 0;     ///< total samples (Monte Carlo mode)
  std::uint64_t seed = 1;

  std::size_t dim() const { return lambda.size(); }
  BoxRegion subbox() const;
  /// {(alpha_1 T^lambda_1, ...) : alpha in J}.
  BoxRegion realized() const;
};

/// Box in map coordinates, sampled by midpoint grid or seeded Monte Carlo.
struct SampleRegion {
  BoxRegion box;
  std::size_t grid = 64;
  Sampling sampling = Sampling::midpoint_grid;
  std::size_t samples = 0;
  std::uint64_t seed = 1;

  std::size_t count() const;
  void point(std::size_t index, std::span<double> out) const;
};

SampleRegion sample_region(const BoxSpec& spec);

/// Fraction of excluded cusp samples above which an average is rejected.
inline constexpr double kMaxCuspFraction = 1e-3;

struct BoxStats {
  std::vector<double> averages;          ///< per observable, over admitted samples
  std::vector<double> std_errors;        ///< sample standard deviation / sqrt(n)
  std::vector<double> compact_fraction;  ///< per eps0, over all samples (cusp counts as outside)
  std::size_t samples = 0;
  std::size_t excluded = 0;              ///< cusp-guard exclusions
  double max_observable = 0.0;           ///< largest admitted observable value
  bool cusp_limit_exceeded() const;
};

/// One pass over the region: Siegel averages of every observable and
/// nondivergence fractions at every eps0 (OpenMP, fixed blocking).
BoxStats box_stats(const PolyMatrix& theta_map, const SampleRegion& region,
                   const std::vector<TestFunction>& observables, const std::vector<double>& eps0s);

namespace reference {
/// Serial single loop over the same samples; test oracle for box_stats.
BoxStats box_stats(const PolyMatrix& theta_map, const SampleRegion& region,
                   const std::vector<TestFunction>& observables, const std::vector<double>& eps0s);
}  // namespace reference

struct AverageResult {
  double value = 0.0;
  std::size_t samples = 0;
  std::size_t excluded = 0;
};

/// Midpoint-grid average of the Siegel observable over the realized box.
/// Throws PreconditionError when grid < 8 and CuspError when more than 0.1%
/// of samples trip the cusp guard.
AverageResult birkhoff_average(const PolyMatrix& theta_map, const BoxSpec& box,
                               const TestFunction& f);
AverageResult birkhoff_average(const PolyMatrix& theta_map, const BoxRegion& box, std::size_t grid,
                               const TestFunction& f);

/// (1/|J|) integral over J of f(theta(alpha, T)).
AverageResult subbox_average(const PolyMatrix& theta_map, const std::vector<Exponent>& lambda,
                             double T, const BoxRegion& J, const TestFunction& f,
                             std::size_t grid);

std::vector<double> nondivergence_fraction(const PolyMatrix& theta_map, const BoxSpec& box,
                                           const std::vector<double>& eps0s);

/// Average of the observable along one period of a closed orbit x -> Theta(x)
/// (k = 1), by midpoint quadrature with `nodes` points.
double periodic_orbit_average(const PolyMatrix& theta_map, double period, const TestFunction& f,
                              std::size_t nodes = std::size_t{1} << 20);

struct ExperimentRow {
  double T = 0.0;  ///< T, or T2 in b-condition sweeps
  std::string observable;
  double average = 0.0;
  double std_error = 0.0;  ///< i.i.d. estimate; only meaningful for Monte Carlo rows
  double reference = 0.0;
  double gap = 0.0;  ///< |average - reference| / reference
  std::vector<double> compact_fraction;
  std::size_t samples = 0;
  std::size_t excluded = 0;
  std::uint64_t seed = 0;
  std::optional<double> residual;  ///< b-condition sweeps only
};

struct ExperimentResult {
  std::string map_id;
  std::vector<double> eps0s;
  std::vector<ExperimentRow> rows;

  /// Comma-separated with a one-line header; numbers at 17 significant digits.
  std::string to_csv() const;
  /// "T,observable,gap" rows for plotting.
  std::string plot_data() const;
};

struct SweepOptions {
  std::size_t grid = 64;
  std::vector<double> eps0s = {0.1, 0.05};
  Sampling sampling = Sampling::midpoint_grid;
  std::size_t samples = 0;
  std::uint64_t seed = 1;
  /// Closed-orbit maps: reference is the one-period average instead of Haar.
  std::optional<double> closed_orbit_period;
  std::string map_id;
};

/// Rows per (T, observable) of subbox averages against the reference.
ExperimentResult convergence_sweep(const PolyMatrix& theta_map, const std::vector<Exponent>& lambda,
                                   const std::vector<double>& T_list,
                                   const std::vector<TestFunction>& observables,
                                   const BoxRegion& J, const SweepOptions& options);

/// Boxes [0, 1.01 T2^b] x [0, T2] against the Haar reference, with the
/// two-variable flow defect at the far corner as a diagnostic column.
ExperimentResult twodim_bcondition_sweep(const PolyMatrix& theta_map, const Exponent& b,
                                         const std::vector<double>& T2_list,
                                         const std::vector<TestFunction>& observables,
                                         const SweepOptions& options);

}  // namespace flowlab
