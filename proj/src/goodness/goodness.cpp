#include "flowlab/goodness.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "flowlab/compiled.hpp"
#include "flowlab/parallel.hpp"

namespace flowlab {

BoxRegion::BoxRegion(std::vector<double> lo, std::vector<double> hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.empty() || lower.size() != upper.size()) {
    throw DomainError("BoxRegion: corner dimensions differ or are empty");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) throw DomainError("BoxRegion: lower must be below upper");
  }
}

BoxRegion BoxRegion::unit(std::size_t k) {
  return BoxRegion(std::vector<double>(k, 0.0), std::vector<double>(k, 1.0));
}

double BoxRegion::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= side(i);
  return v;
}

bool BoxRegion::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < dim(); ++i) {
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  }
  return true;
}

ScalarField polynomial_field(const GenPoly& p, std::size_t k) {
  std::vector<Var> inputs;
  for (std::size_t i = 0; i < k; ++i) inputs.push_back(coordinate_var(i));
  auto compiled = std::make_shared<CompiledPoly<double>>(p, inputs);
  return [compiled](std::span<const double> x) { return (*compiled)(x); };
}

std::size_t grid_points(std::size_t k, std::size_t grid) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < k; ++i) n *= grid;
  return n;
}

void grid_point(const BoxRegion& box, std::size_t grid, GridKind kind, std::size_t index,
                std::span<double> out) {
  const std::size_t k = box.dim();
  for (std::size_t a = k; a-- > 0;) {
    const std::size_t j = index % grid;
    index /= grid;
    const double u = kind == GridKind::midpoint
                         ? (static_cast<double>(j) + 0.5) / static_cast<double>(grid)
                         : static_cast<double>(j) / static_cast<double>(grid - 1);
    out[a] = box.lower[a] + u * box.side(a);
  }
}

namespace {

void require_grid(std::size_t grid, GridKind kind) {
  if (grid < 1 || (kind == GridKind::corner && grid < 2)) {
    throw PreconditionError("grid resolution too small");
  }
}

}  // namespace

std::vector<double> grid_values(const ScalarField& f, const BoxRegion& box, std::size_t grid,
                                GridKind kind) {
  require_grid(grid, kind);
  if (box.dim() > 3) throw DimensionError("grid_values: at most 3 dimensions");
  std::vector<double> values(grid_points(box.dim(), grid));
  const std::size_t k = box.dim();
  parallel_fill(values, [&](std::size_t i) {
    double x[3];
    grid_point(box, grid, kind, i, std::span<double>(x, k));
    return f(std::span<const double>(x, k));
  });
  return values;
}

double sup_norm(const ScalarField& f, const BoxRegion& box, std::size_t grid) {
  if (box.dim() > 3) throw DimensionError("sup_norm: at most 3 dimensions");
  const auto values = grid_values(f, box, grid, GridKind::corner);
  double best = 0.0;
  for (double v : values) best = std::max(best, std::abs(v));
  return best;
}

SublevelProfile::SublevelProfile(const ScalarField& f, const BoxRegion& box, std::size_t grid)
    : SublevelProfile(grid_values(f, box, grid, GridKind::midpoint), box, grid,
                      sup_norm(f, box, grid + 1)) {}

SublevelProfile::SublevelProfile(std::vector<double> abs_values, const BoxRegion& box,
                                 std::size_t grid, double sup)
    : sorted_(std::move(abs_values)), volume_(box.volume()), sup_(sup), dim_(box.dim()),
      grid_(grid) {
  for (auto& v : sorted_) v = std::abs(v);
  std::sort(sorted_.begin(), sorted_.end());
  // The corner grid may miss a larger midpoint value.
  if (!sorted_.empty()) sup_ = std::max(sup_, sorted_.back());
}

double SublevelProfile::measure_below(double delta) const {
  const auto count = static_cast<std::size_t>(
      std::lower_bound(sorted_.begin(), sorted_.end(), delta) - sorted_.begin());
  return volume_ * static_cast<double>(count) / static_cast<double>(sorted_.size());
}

GoodCheck good_inequality_check(const SublevelProfile& profile, double delta, double C,
                                double alpha) {
  if (!(delta > 0)) throw PreconditionError("good_inequality_check: delta must be positive");
  if (!(C >= 1)) throw PreconditionError("good_inequality_check: C must be at least 1");
  if (profile.sup() == 0) throw DomainError("good_inequality_check: ||f||_B = 0");
  GoodCheck out;
  out.lhs = profile.measure_below(delta);
  out.rhs = C * std::pow(delta / profile.sup(), alpha) * profile.volume();
  out.holds = out.lhs <= out.rhs + profile.slack() * profile.volume();
  return out;
}

GoodCheck good_inequality_check(const ScalarField& f, const BoxRegion& box, double delta, double C,
                                double alpha, std::size_t grid) {
  return good_inequality_check(SublevelProfile(f, box, grid), delta, C, alpha);
}

double fit_min_C(const SublevelProfile& profile, double alpha, std::span<const double> delta_grid) {
  if (delta_grid.empty()) throw PreconditionError("fit_min_C: empty delta grid");
  if (profile.sup() == 0) throw DomainError("fit_min_C: ||f||_B = 0");
  double best = 1.0;
  for (double delta : delta_grid) {
    if (!(delta > 0)) throw PreconditionError("fit_min_C: delta must be positive");
    const double base = std::pow(delta / profile.sup(), alpha) * profile.volume();
    best = std::max(best, profile.measure_below(delta) / base);
  }
  return best;
}

double fit_min_C(const ScalarField& f, const BoxRegion& box, double alpha,
                 std::span<const double> delta_grid, std::size_t grid) {
  return fit_min_C(SublevelProfile(f, box, grid), alpha, delta_grid);
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0) || !(hi >= lo) || count == 0) throw PreconditionError("log_grid: bad range");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo * std::exp(step * static_cast<double>(i));
  return out;
}

std::vector<double> geometric_midpoints(std::span<const double> grid) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) out.push_back(std::sqrt(grid[i] * grid[i + 1]));
  return out;
}

GoodCertificate certify_good(const ScalarField& f, const BoxRegion& box, const Exponent& alpha,
                             std::span<const double> train, std::span<const double> test,
                             std::size_t grid) {
  const SublevelProfile profile(f, box, grid);
  const double a = static_cast<double>(alpha.numerator()) / static_cast<double>(alpha.denominator());
  GoodCertificate cert;
  cert.alpha = alpha;
  cert.sup = profile.sup();
  cert.slack = profile.slack();
  // The measure is monotone in delta, so pairing each training interval's
  // upper measure with its lower rhs bounds every delta in between.
  std::vector<double> sorted(train.begin(), train.end());
  std::sort(sorted.begin(), sorted.end());
  cert.C = fit_min_C(profile, a, sorted);
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    const double base = std::pow(sorted[i] / profile.sup(), a) * profile.volume();
    cert.C = std::max(cert.C, profile.measure_below(sorted[i + 1]) / base);
  }
  cert.delta_grid.assign(test.begin(), test.end());
  for (double delta : test) {
    const GoodCheck check = good_inequality_check(profile, delta, cert.C, a);
    cert.lhs.push_back(check.lhs);
    cert.rhs.push_back(check.rhs);
    cert.holds.push_back(check.holds);
    if (!check.holds) ++cert.violations;
  }
  return cert;
}

SupExtension sup_extension(const ScalarField& p, const BoxRegion& e, const BoxRegion& e_prime,
                           double R, double C, double alpha, std::size_t grid) {
  if (e.dim() != e_prime.dim()) throw DimensionError("sup_extension: dimension mismatch");
  for (std::size_t i = 0; i < e.dim(); ++i) {
    if (e_prime.lower[i] < e.lower[i] || e_prime.upper[i] > e.upper[i]) {
      throw PreconditionError("sup_extension: E' is not contained in E");
    }
  }
  if (!(alpha > 0) || !(C >= 1)) throw PreconditionError("sup_extension: need alpha > 0, C >= 1");
  SupExtension out;
  out.sup_e_prime = sup_norm(p, e_prime, grid);
  if (!(out.sup_e_prime < R)) {
    throw PreconditionError("sup_extension: sup over E' is " +
                            numeric::format_double(out.sup_e_prime) + ", not below R");
  }
  out.r_prime = std::pow(C, 1.0 / alpha) * R * std::pow(e.volume() / e_prime.volume(), 1.0 / alpha);
  out.sup_e = sup_norm(p, e, grid);
  out.verified = out.sup_e < out.r_prime;
  return out;
}

// ------------------------------------------------------------ covering

bool Cube::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < center.size(); ++i) {
    if (std::abs(x[i] - center[i]) > half_width) return false;
  }
  return true;
}

std::size_t default_besicovitch_bound(std::size_t k) { return (std::size_t{1} << k) + 1; }

CubeCover besicovitch_select(const std::vector<std::vector<double>>& centers,
                             std::span<const double> half_widths, std::size_t bound) {
  if (centers.empty()) throw PreconditionError("besicovitch_select: no input cubes");
  if (centers.size() != half_widths.size()) {
    throw DimensionError("besicovitch_select: centers and half-widths differ in length");
  }
  const std::size_t k = centers.front().size();
  if (k == 0 || k > 3) throw DimensionError("besicovitch_select: dimension must be 1..3");
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (centers[i].size() != k) throw DimensionError("besicovitch_select: ragged centers");
    if (!(half_widths[i] > 0)) throw PreconditionError("besicovitch_select: half-width <= 0");
  }
  CubeCover cover;
  cover.bound = bound ? bound : default_besicovitch_bound(k);

  std::vector<std::size_t> order(centers.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return half_widths[a] > half_widths[b]; });
  for (std::size_t idx : order) {
    bool covered = false;
    for (const auto& cube : cover.cubes) {
      if (cube.contains(centers[idx])) {
        covered = true;
        break;
      }
    }
    if (covered) continue;
    cover.selected.push_back(idx);
    cover.cubes.push_back({centers[idx], half_widths[idx]});
  }

  cover.covers_all = true;
  for (const auto& c : centers) {
    bool hit = false;
    for (const auto& cube : cover.cubes) hit = hit || cube.contains(c);
    cover.covers_all = cover.covers_all && hit;
  }

  // Depth of closed boxes peaks at a point whose every coordinate is some lower face.
  const std::size_t m = cover.cubes.size();
  std::vector<std::vector<double>> faces(k);
  for (std::size_t a = 0; a < k; ++a) {
    for (const auto& cube : cover.cubes) faces[a].push_back(cube.center[a] - cube.half_width);
    std::sort(faces[a].begin(), faces[a].end());
    faces[a].erase(std::unique(faces[a].begin(), faces[a].end()), faces[a].end());
  }
  std::size_t total = 1;
  for (const auto& f : faces) total *= f.size();
  cover.probe_points = total;
  cover.histogram.assign(m + 1, 0);
  std::vector<double> probe(k);
  for (std::size_t index = 0; index < total; ++index) {
    std::size_t rest = index;
    for (std::size_t a = k; a-- > 0;) {
      probe[a] = faces[a][rest % faces[a].size()];
      rest /= faces[a].size();
    }
    std::size_t depth = 0;
    for (const auto& cube : cover.cubes) depth += cube.contains(probe) ? 1 : 0;
    ++cover.histogram[depth];
    cover.max_multiplicity = std::max(cover.max_multiplicity, depth);
  }
  return cover;
}

// ------------------------------------------------------------ relative size

double relative_size_alpha(int m, int l, int k) {
  if (m < 1 || l < 1 || k < 1) throw PreconditionError("relative_size_alpha: degrees must be >= 1");
  return 1.0 / (2.0 * m * l * k);
}

RelativeSizeParams relative_size_neighborhoods(double r, double eps, double c, int nk, double alpha,
                                               double beta) {
  if (!(eps > 0) || !(eps < 1)) throw PreconditionError("relative_size: eps must lie in (0, 1)");
  if (!(r > 0) || !(c > 0) || !(beta > 0) || !(alpha > 0) || nk < 1) {
    throw PreconditionError("relative_size: r, c, beta, alpha, N_k must be positive");
  }
  RelativeSizeParams out;
  out.alpha = alpha;
  out.delta = std::pow(eps / (c * nk), 1.0 / alpha);
  const double root = std::sqrt(out.delta);
  out.d_radius = r / root;
  out.phi = {(r + beta) / root, beta};
  out.psi = {r + beta, beta * out.delta};
  return out;
}

RelativeSizeParams relative_size_neighborhoods(double r, double eps, double c, int nk, int m, int l,
                                               int k, double beta) {
  return relative_size_neighborhoods(r, eps, c, nk, relative_size_alpha(m, l, k), beta);
}

std::string to_string(RelativeSizeStatus status) {
  switch (status) {
    case RelativeSizeStatus::holds: return "HOLDS";
    case RelativeSizeStatus::fails: return "FAILS";
    case RelativeSizeStatus::vacuous: return "VACUOUS";
  }
  return "?";
}

RelativeSizeResult relative_size_check(const PolyMatrix& theta_map, std::span<const double> v0,
                                       const BoxRegion& box, const GenPoly& p,
                                       const Neighborhood& psi, const Neighborhood& phi,
                                       double eps, std::size_t grid) {
  const std::size_t n = theta_map.dim();
  const std::size_t k = box.dim();
  if (v0.size() != n) throw DimensionError("relative_size_check: v0 has wrong length");
  if (psi.radius > phi.radius || psi.level > phi.level) {
    throw PreconditionError("relative_size_check: Psi must lie inside Phi");
  }
  std::vector<Var> coords;
  for (std::size_t i = 0; i < k; ++i) coords.push_back(coordinate_var(i));
  std::vector<Var> vec;
  for (std::size_t i = 0; i < n; ++i) vec.push_back(vector_var(i));
  const CompiledMatrix<double> theta(theta_map, coords);
  const CompiledPoly<double> poly(p, vec);

  struct Counts {
    std::size_t psi = 0, phi = 0, outside = 0;
    Counts& operator+=(const Counts& o) {
      psi += o.psi;
      phi += o.phi;
      outside += o.outside;
      return *this;
    }
  };
  const std::size_t total = grid_points(k, grid);
  const Counts counts = blocked_sum<Counts>(total, [&](std::size_t i) {
    double x[3];
    grid_point(box, grid, GridKind::midpoint, i, std::span<double>(x, k));
    const Matrix<double> g = theta(std::span<const double>(x, k));
    double v[3] = {0, 0, 0};
    double norm2 = 0;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) v[r] += g(r, c) * v0[c];
      norm2 += v[r] * v[r];
    }
    const double norm = std::sqrt(norm2);
    const double level = std::abs(poly(std::span<const double>(v, n)));
    Counts c;
    const bool in_phi = norm < phi.radius && level < phi.level;
    c.phi = in_phi ? 1 : 0;
    c.psi = (norm < psi.radius && level < psi.level) ? 1 : 0;
    c.outside = in_phi ? 0 : 1;
    return c;
  });
  RelativeSizeResult out;
  const double cell = box.volume() / static_cast<double>(total);
  out.lhs = cell * static_cast<double>(counts.psi);
  out.rhs = eps * cell * static_cast<double>(counts.phi);
  out.outside_phi = counts.outside;
  if (counts.outside == 0) {
    out.status = RelativeSizeStatus::vacuous;
  } else {
    const double slack = 2.0 * static_cast<double>(k) / static_cast<double>(grid);
    out.status = out.lhs <= out.rhs + slack * box.volume() ? RelativeSizeStatus::holds
                                                           : RelativeSizeStatus::fails;
  }
  return out;
}

namespace reference {

std::vector<double> grid_values(const ScalarField& f, const BoxRegion& box, std::size_t grid,
                                GridKind kind) {
  require_grid(grid, kind);
  std::vector<double> values(grid_points(box.dim(), grid));
  std::vector<double> x(box.dim());
  for (std::size_t i = 0; i < values.size(); ++i) {
    grid_point(box, grid, kind, i, x);
    values[i] = f(x);
  }
  return values;
}

double sublevel_measure(const ScalarField& f, const BoxRegion& box, std::size_t grid,
                        double delta) {
  const auto values = reference::grid_values(f, box, grid, GridKind::midpoint);
  std::size_t count = 0;
  for (double v : values) count += std::abs(v) < delta ? 1 : 0;
  return box.volume() * static_cast<double>(count) / static_cast<double>(values.size());
}

}  // namespace reference

}  // namespace flowlab
