#include "flowlab/experiment.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "flowlab/compiled.hpp"
#include "flowlab/flowlimit.hpp"
#include "flowlab/parallel.hpp"

namespace flowlab {

namespace {

constexpr std::size_t kMaxObservables = 8;
constexpr std::size_t kMaxThresholds = 8;

double exponent_value(const Exponent& e) {
  return static_cast<double>(e.numerator()) / static_cast<double>(e.denominator());
}

struct Accumulator {
  std::array<double, kMaxObservables> sums{};
  std::array<double, kMaxObservables> squares{};
  std::array<std::size_t, kMaxThresholds> compact{};
  std::size_t samples = 0;
  std::size_t excluded = 0;
  double max_value = 0.0;

  Accumulator& operator+=(const Accumulator& o) {
    for (std::size_t i = 0; i < kMaxObservables; ++i) {
      sums[i] += o.sums[i];
      squares[i] += o.squares[i];
    }
    for (std::size_t i = 0; i < kMaxThresholds; ++i) compact[i] += o.compact[i];
    samples += o.samples;
    excluded += o.excluded;
    max_value = std::max(max_value, o.max_value);
    return *this;
  }
};

class SampleEvaluator {
 public:
  SampleEvaluator(const PolyMatrix& theta_map, const SampleRegion& region,
                  const std::vector<TestFunction>& observables, const std::vector<double>& eps0s)
      : region_(region), observables_(observables), eps0s_(eps0s), k_(region.box.dim()) {
    if (observables.size() > kMaxObservables) {
      throw PreconditionError("at most 8 observables per pass");
    }
    if (eps0s.size() > kMaxThresholds) throw PreconditionError("at most 8 eps0 thresholds");
    if (k_ > 3) throw DimensionError("sample region: at most 3 dimensions");
    for (std::size_t i = 3; i-- > k_;) {
      if (theta_map.depends_on(coordinate_var(i))) {
        throw DimensionError("map uses coordinate " + std::string(var_name(coordinate_var(i))) +
                             " beyond the box dimension");
      }
    }
    std::vector<Var> inputs;
    for (std::size_t i = 0; i < k_; ++i) inputs.push_back(coordinate_var(i));
    theta_ = CompiledMatrix<wide_real>(theta_map, inputs);
  }

  Accumulator operator()(std::size_t index) const {
    double x[3] = {0, 0, 0};
    region_.point(index, std::span<double>(x, k_));
    wide_real args[3] = {x[0], x[1], x[2]};
    const Matrix<wide_real> g = theta_(std::span<const wide_real>(args, k_));
    Accumulator acc;
    acc.samples = 1;
    const UnimodularLattice lattice = reduce_basis(g);
    for (std::size_t e = 0; e < eps0s_.size(); ++e) {
      acc.compact[e] = in_compact(lattice, eps0s_[e]) ? 1 : 0;
    }
    if (lattice.shortest() < kCuspGuard) {
      acc.excluded = 1;
      return acc;
    }
    double values[kMaxObservables];
    siegel_transform_many(lattice, observables_, std::span<double>(values, observables_.size()));
    for (std::size_t i = 0; i < observables_.size(); ++i) {
      acc.sums[i] = values[i];
      acc.squares[i] = values[i] * values[i];
      acc.max_value = std::max(acc.max_value, values[i]);
    }
    return acc;
  }

 private:
  const SampleRegion& region_;
  const std::vector<TestFunction>& observables_;
  const std::vector<double>& eps0s_;
  std::size_t k_;
  CompiledMatrix<wide_real> theta_;
};

BoxStats finish(const Accumulator& acc, std::size_t observables, std::size_t thresholds) {
  BoxStats out;
  out.samples = acc.samples;
  out.excluded = acc.excluded;
  out.max_observable = acc.max_value;
  const std::size_t admitted = acc.samples - acc.excluded;
  const double n = static_cast<double>(admitted);
  for (std::size_t i = 0; i < observables; ++i) {
    const double mean = admitted ? acc.sums[i] / n : 0.0;
    out.averages.push_back(mean);
    const double var = admitted > 1 ? std::max(0.0, acc.squares[i] / n - mean * mean) : 0.0;
    out.std_errors.push_back(admitted > 1 ? std::sqrt(var / (n - 1.0)) : 0.0);
  }
  for (std::size_t e = 0; e < thresholds; ++e) {
    out.compact_fraction.push_back(static_cast<double>(acc.compact[e]) /
                                   static_cast<double>(acc.samples));
  }
  return out;
}

}  // namespace

BoxRegion BoxSpec::subbox() const { return J.dim() != 0 ? J : BoxRegion::unit(dim()); }

BoxRegion BoxSpec::realized() const {
  const BoxRegion j = subbox();
  if (j.dim() != dim()) throw DimensionError("BoxSpec: J and lambda differ in dimension");
  std::vector<double> lo(dim()), hi(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    if (j.lower[i] < 0 || j.upper[i] > 1) throw PreconditionError("BoxSpec: J must lie in [0,1]^k");
    if (!(lambda[i] > 0)) throw PreconditionError("BoxSpec: lambda must be positive");
    const double scale = std::pow(T, exponent_value(lambda[i]));
    lo[i] = j.lower[i] * scale;
    hi[i] = j.upper[i] * scale;
  }
  return BoxRegion(lo, hi);
}

std::size_t SampleRegion::count() const {
  return sampling == Sampling::midpoint_grid ? grid_points(box.dim(), grid) : samples;
}

void SampleRegion::point(std::size_t index, std::span<double> out) const {
  if (sampling == Sampling::midpoint_grid) {
    grid_point(box, grid, GridKind::midpoint, index, out);
    return;
  }
  std::uint64_t state = stream_seed(seed, index);
  for (std::size_t a = 0; a < box.dim(); ++a) {
    state = splitmix64(state);
    out[a] = box.lower[a] + unit_double(state) * box.side(a);
  }
}

SampleRegion sample_region(const BoxSpec& spec) {
  return {spec.realized(), spec.grid, spec.sampling, spec.samples, spec.seed};
}

bool BoxStats::cusp_limit_exceeded() const {
  return samples > 0 &&
         static_cast<double>(excluded) > kMaxCuspFraction * static_cast<double>(samples);
}

BoxStats box_stats(const PolyMatrix& theta_map, const SampleRegion& region,
                   const std::vector<TestFunction>& observables, const std::vector<double>& eps0s) {
  const SampleEvaluator evaluate(theta_map, region, observables, eps0s);
  const Accumulator acc = blocked_sum<Accumulator>(region.count(), evaluate);
  return finish(acc, observables.size(), eps0s.size());
}

namespace reference {

BoxStats box_stats(const PolyMatrix& theta_map, const SampleRegion& region,
                   const std::vector<TestFunction>& observables, const std::vector<double>& eps0s) {
  const SampleEvaluator evaluate(theta_map, region, observables, eps0s);
  Accumulator acc;
  for (std::size_t i = 0; i < region.count(); ++i) acc += evaluate(i);
  return finish(acc, observables.size(), eps0s.size());
}

}  // namespace reference

namespace {

AverageResult single_average(const PolyMatrix& theta_map, const SampleRegion& region,
                             const TestFunction& f) {
  if (region.sampling == Sampling::midpoint_grid && region.grid < 8) {
    throw PreconditionError("average: grid must have at least 8 points per axis");
  }
  const BoxStats stats = box_stats(theta_map, region, {f}, {});
  if (stats.cusp_limit_exceeded()) {
    throw CuspError("average: " + std::to_string(stats.excluded) + " of " +
                    std::to_string(stats.samples) + " samples excluded by the cusp guard");
  }
  return {stats.averages.front(), stats.samples, stats.excluded};
}

}  // namespace

AverageResult birkhoff_average(const PolyMatrix& theta_map, const BoxSpec& box,
                               const TestFunction& f) {
  return single_average(theta_map, sample_region(box), f);
}

AverageResult birkhoff_average(const PolyMatrix& theta_map, const BoxRegion& box, std::size_t grid,
                               const TestFunction& f) {
  SampleRegion region;
  region.box = box;
  region.grid = grid;
  return single_average(theta_map, region, f);
}

AverageResult subbox_average(const PolyMatrix& theta_map, const std::vector<Exponent>& lambda,
                             double T, const BoxRegion& J, const TestFunction& f,
                             std::size_t grid) {
  if (grid < 8) throw PreconditionError("subbox_average: grid must have at least 8 points per axis");
  if (J.dim() != lambda.size()) throw DimensionError("subbox_average: J and lambda differ");
  // Sample alpha in J and map each point to x_i = alpha_i T^lambda_i.
  std::vector<double> scale;
  for (const auto& l : lambda) scale.push_back(std::pow(T, exponent_value(l)));
  const std::size_t k = lambda.size();
  std::vector<Var> inputs;
  for (std::size_t i = 0; i < k; ++i) inputs.push_back(coordinate_var(i));
  const CompiledMatrix<wide_real> theta(theta_map, inputs);
  struct Acc {
    double sum = 0;
    std::size_t excluded = 0;
    Acc& operator+=(const Acc& o) {
      sum += o.sum;
      excluded += o.excluded;
      return *this;
    }
  };
  const std::size_t total = grid_points(k, grid);
  const Acc acc = blocked_sum<Acc>(total, [&](std::size_t i) {
    double alpha[3];
    grid_point(J, grid, GridKind::midpoint, i, std::span<double>(alpha, k));
    wide_real x[3];
    for (std::size_t a = 0; a < k; ++a) x[a] = wide_real(alpha[a]) * wide_real(scale[a]);
    const UnimodularLattice lattice = reduce_basis(theta(std::span<const wide_real>(x, k)));
    if (lattice.shortest() < kCuspGuard) return Acc{0.0, 1};
    return Acc{siegel_transform(lattice, f), 0};
  });
  if (static_cast<double>(acc.excluded) > kMaxCuspFraction * static_cast<double>(total)) {
    throw CuspError("subbox_average: too many cusp exclusions");
  }
  return {acc.sum / static_cast<double>(total - acc.excluded), total, acc.excluded};
}

std::vector<double> nondivergence_fraction(const PolyMatrix& theta_map, const BoxSpec& box,
                                           const std::vector<double>& eps0s) {
  return box_stats(theta_map, sample_region(box), {}, eps0s).compact_fraction;
}

double periodic_orbit_average(const PolyMatrix& theta_map, double period, const TestFunction& f,
                              std::size_t nodes) {
  if (!(period > 0)) throw PreconditionError("periodic_orbit_average: period must be positive");
  SampleRegion region;
  region.box = BoxRegion({0.0}, {period});
  region.sampling = Sampling::midpoint_grid;
  region.grid = nodes;
  const BoxStats stats = box_stats(theta_map, region, {f}, {});
  if (stats.excluded) throw CuspError("periodic_orbit_average: orbit enters the cusp");
  return stats.averages.front();
}

namespace {

std::string csv_number(double v) { return numeric::format_double(v); }

std::string short_label(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

}  // namespace

std::string ExperimentResult::to_csv() const {
  std::ostringstream out;
  out << "map,T,observable,average,std_error,reference,gap,samples,excluded,seed";
  for (double e : eps0s) out << ",compact_" << short_label(e);
  out << ",residual\n";
  for (const auto& row : rows) {
    out << map_id << ',' << csv_number(row.T) << ',' << row.observable << ','
        << csv_number(row.average) << ',' << csv_number(row.std_error) << ','
        << csv_number(row.reference) << ','
        << csv_number(row.gap) << ',' << row.samples << ',' << row.excluded << ',' << row.seed;
    for (double f : row.compact_fraction) out << ',' << csv_number(f);
    out << ',' << (row.residual ? csv_number(*row.residual) : std::string("NA")) << '\n';
  }
  return out.str();
}

std::string ExperimentResult::plot_data() const {
  std::ostringstream out;
  out << "T,observable,gap\n";
  for (const auto& row : rows) {
    out << csv_number(row.T) << ',' << row.observable << ',' << csv_number(row.gap) << '\n';
  }
  return out.str();
}

namespace {

std::vector<double> references(const PolyMatrix& theta_map,
                               const std::vector<TestFunction>& observables,
                               const SweepOptions& options) {
  std::vector<double> refs;
  for (const auto& f : observables) {
    if (options.closed_orbit_period) {
      refs.push_back(periodic_orbit_average(theta_map, *options.closed_orbit_period, f));
    } else {
      refs.push_back(haar_expectation(f, theta_map.dim()));
    }
  }
  return refs;
}

void append_rows(ExperimentResult& result, double T, const BoxStats& stats,
                 const std::vector<TestFunction>& observables, const std::vector<double>& refs,
                 const SweepOptions& options, std::optional<double> residual) {
  for (std::size_t i = 0; i < observables.size(); ++i) {
    ExperimentRow row;
    row.T = T;
    row.observable = observables[i].name();
    row.average = stats.averages[i];
    row.std_error = stats.std_errors[i];
    row.reference = refs[i];
    row.gap = std::abs(row.average - row.reference) / row.reference;
    row.compact_fraction = stats.compact_fraction;
    row.samples = stats.samples;
    row.excluded = stats.excluded;
    row.seed = options.seed;
    row.residual = residual;
    result.rows.push_back(std::move(row));
  }
}

}  // namespace

ExperimentResult convergence_sweep(const PolyMatrix& theta_map, const std::vector<Exponent>& lambda,
                                   const std::vector<double>& T_list,
                                   const std::vector<TestFunction>& observables,
                                   const BoxRegion& J, const SweepOptions& options) {
  for (std::size_t i = 1; i < T_list.size(); ++i) {
    if (!(T_list[i] > T_list[i - 1])) throw PreconditionError("convergence_sweep: T must increase");
  }
  ExperimentResult result;
  result.map_id = options.map_id;
  result.eps0s = options.eps0s;
  const auto refs = references(theta_map, observables, options);
  for (double T : T_list) {
    BoxSpec spec;
    spec.lambda = lambda;
    spec.T = T;
    spec.J = J;
    spec.grid = options.grid;
    spec.sampling = options.sampling;
    spec.samples = options.samples;
    spec.seed = options.seed;
    const BoxStats stats = box_stats(theta_map, sample_region(spec), observables, options.eps0s);
    append_rows(result, T, stats, observables, refs, options, std::nullopt);
  }
  return result;
}

ExperimentResult twodim_bcondition_sweep(const PolyMatrix& theta_map, const Exponent& b,
                                         const std::vector<double>& T2_list,
                                         const std::vector<TestFunction>& observables,
                                         const SweepOptions& options) {
  for (std::size_t i = 1; i < T2_list.size(); ++i) {
    if (!(T2_list[i] > T2_list[i - 1])) throw PreconditionError("b-condition sweep: T2 must increase");
  }
  const TwoDimFlowResult flow = twodim_flow(theta_map);
  if (!(b > flow.p)) throw PreconditionError("b-condition sweep: b must exceed p");
  ExperimentResult result;
  result.map_id = options.map_id;
  result.eps0s = options.eps0s;
  const auto refs = references(theta_map, observables, options);
  for (double T2 : T2_list) {
    SampleRegion region;
    const double x_side = 1.01 * std::pow(T2, exponent_value(b));
    region.box = BoxRegion({0.0, 0.0}, {x_side, T2});
    region.grid = options.grid;
    region.sampling = options.sampling;
    region.samples = options.samples;
    region.seed = options.seed;
    const BoxStats stats = box_stats(theta_map, region, observables, options.eps0s);
    const double residual = twodim_flow_defect(theta_map, flow, 1.0, x_side, T2);
    append_rows(result, T2, stats, observables, refs, options, residual);
  }
  return result;
}

}  // namespace flowlab
