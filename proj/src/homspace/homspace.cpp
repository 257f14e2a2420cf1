#include "flowlab/homspace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "flowlab/error.hpp"
#include "flowlab/parallel.hpp"

namespace flowlab {

namespace {

using Vec = std::array<wide_real, 3>;

wide_real dot(const Vec& a, const Vec& b, std::size_t n) {
  wide_real s = 0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(Vec& y, wide_real mu, const Vec& x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] -= mu * x[i];
}

constexpr int kMaxReductionSteps = 100000;
constexpr double kBoundaryTolerance = 1e-12;

void gauss_reduce(Vec& b1, Vec& b2, std::size_t n) {
  for (int step = 0; step < kMaxReductionSteps; ++step) {
    if (dot(b2, b2, n) < dot(b1, b1, n)) std::swap(b1, b2);
    const wide_real mu = numeric::round(dot(b1, b2, n) / dot(b1, b1, n));
    if (mu == 0) return;
    axpy(b2, mu, b1, n);
    if (!(dot(b2, b2, n) < dot(b1, b1, n))) return;
  }
  throw InvariantError("reduce_basis: Gauss reduction did not terminate");
}

void pairwise_reduce(std::array<Vec, 3>& b, std::size_t n) {
  for (int sweep = 0; sweep < kMaxReductionSteps; ++sweep) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const wide_real mu = numeric::round(dot(b[i], b[j], n) / dot(b[i], b[i], n));
        if (mu == 0) continue;
        Vec candidate = b[j];
        axpy(candidate, mu, b[i], n);
        if (dot(candidate, candidate, n) < dot(b[j], b[j], n)) {
          b[j] = candidate;
          changed = true;
        }
      }
    }
    if (!changed) return;
  }
  throw InvariantError("reduce_basis: pairwise reduction did not terminate");
}

// Fincke-Pohst: visits every nonzero coefficient vector x with ||B x||^2 <= r2.
template <class Visit>
void enumerate(const Matrix<double>& basis, double r2, Visit&& visit) {
  const std::size_t n = basis.dim();
  std::array<std::array<double, 3>, 3> bstar{};
  std::array<std::array<double, 3>, 3> mu{};
  std::array<double, 3> norm2{};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < n; ++r) bstar[i][r] = basis(r, i);
    for (std::size_t j = 0; j < i; ++j) {
      double d = 0;
      for (std::size_t r = 0; r < n; ++r) d += basis(r, i) * bstar[j][r];
      mu[i][j] = d / norm2[j];
      for (std::size_t r = 0; r < n; ++r) bstar[i][r] -= mu[i][j] * bstar[j][r];
    }
    norm2[i] = 0;
    for (std::size_t r = 0; r < n; ++r) norm2[i] += bstar[i][r] * bstar[i][r];
  }
  const double bound = r2 * (1.0 + 1e-9) + 1e-300;
  std::array<long, 3> x{};
  auto recurse = [&](auto&& self, std::size_t level, double partial) -> void {
    double center = 0;
    for (std::size_t j = level + 1; j < n; ++j) center -= mu[j][level] * static_cast<double>(x[j]);
    const double spread = std::sqrt(std::max(0.0, (bound - partial) / norm2[level]));
    const long lo = static_cast<long>(std::ceil(center - spread));
    const long hi = static_cast<long>(std::floor(center + spread));
    for (long v = lo; v <= hi; ++v) {
      x[level] = v;
      const double diff = static_cast<double>(v) - center;
      const double next = partial + diff * diff * norm2[level];
      if (next > bound) continue;
      if (level == 0) {
        bool zero = true;
        for (std::size_t j = 0; j < n; ++j) zero = zero && x[j] == 0;
        if (zero) continue;
        double len2 = 0;
        for (std::size_t r = 0; r < n; ++r) {
          double c = 0;
          for (std::size_t j = 0; j < n; ++j) c += basis(r, j) * static_cast<double>(x[j]);
          len2 += c * c;
        }
        if (len2 <= r2 * (1.0 + 2.0 * kBoundaryTolerance)) visit(len2);
      } else {
        self(self, level - 1, next);
      }
    }
    x[level] = 0;
  };
  recurse(recurse, n - 1, 0.0);
}

}  // namespace

UnimodularLattice reduce_basis(const Matrix<wide_real>& g) {
  const std::size_t n = g.dim();
  if (n != 2 && n != 3) throw DimensionError("reduce_basis: N must be 2 or 3");
  const wide_real det = determinant(g);
  if (numeric::abs(det - 1) > wide_real(1e-9)) {
    throw DomainError("reduce_basis: |det - 1| = " +
                      numeric::format_double(numeric::to_double(numeric::abs(det - 1))));
  }
  std::array<Vec, 3> b{};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t r = 0; r < n; ++r) b[j][r] = g(r, j);
  }
  if (n == 2) {
    gauss_reduce(b[0], b[1], n);
  } else {
    pairwise_reduce(b, n);
  }
  std::sort(b.begin(), b.begin() + static_cast<long>(n),
            [&](const Vec& a, const Vec& c) { return dot(a, a, n) < dot(c, c, n); });
  UnimodularLattice out;
  out.basis_ = g;
  out.reduced_ = Matrix<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t r = 0; r < n; ++r) out.reduced_(r, j) = numeric::to_double(b[j][r]);
  }
  double best2 = numeric::to_double(dot(b[0], b[0], n));
  if (best2 >= kCuspGuard * kCuspGuard) {
    enumerate(out.reduced_, best2, [&](double len2) { best2 = std::min(best2, len2); });
  }
  out.shortest_ = std::sqrt(best2);
  return out;
}

UnimodularLattice reduce_basis(const Matrix<double>& g) {
  Matrix<wide_real> wide(g.dim());
  for (std::size_t i = 0; i < g.dim(); ++i) {
    for (std::size_t j = 0; j < g.dim(); ++j) wide(i, j) = g(i, j);
  }
  return reduce_basis(wide);
}

double shortest_vector_length(const UnimodularLattice& lattice) { return lattice.shortest(); }

double TestFunction::operator()(double r) const {
  if (r > radius * (1.0 + kBoundaryTolerance)) return 0.0;
  if (kind == TestKind::indicator_ball) return 1.0;
  const double u = r / radius;
  const double w = std::max(0.0, 1.0 - u * u);
  return w * w;
}

TestFunction TestFunction::parse(std::string_view text) {
  const std::string_view prefix = "siegel:";
  if (text.substr(0, prefix.size()) != prefix) {
    throw ParseError("observable must start with 'siegel:': " + std::string(text));
  }
  text.remove_prefix(prefix.size());
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ParseError("observable needs a radius");
  const std::string_view kind = text.substr(0, colon);
  const std::string radius(text.substr(colon + 1));
  TestFunction f;
  if (kind == "indicator") {
    f.kind = TestKind::indicator_ball;
  } else if (kind == "bump") {
    f.kind = TestKind::smooth_bump;
  } else {
    throw ParseError("unknown observable kind: " + std::string(kind));
  }
  std::size_t used = 0;
  try {
    f.radius = std::stod(radius, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != radius.size() || !(f.radius > 0)) {
    throw ParseError("observable radius must be a positive number: " + radius);
  }
  return f;
}

std::string TestFunction::name() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "siegel:%s:%g",
                kind == TestKind::indicator_ball ? "indicator" : "bump", radius);
  return buf;
}

double siegel_transform(const UnimodularLattice& lattice, const TestFunction& f) {
  if (lattice.shortest() < kCuspGuard) {
    throw CuspError("siegel_transform: lambda_1 = " + numeric::format_double(lattice.shortest()) +
                    " is below the cusp guard");
  }
  double sum = 0.0;
  enumerate(lattice.reduced(), f.radius * f.radius,
            [&](double len2) { sum += f(std::sqrt(len2)); });
  return sum;
}

void siegel_transform_many(const UnimodularLattice& lattice, std::span<const TestFunction> fs,
                           std::span<double> out) {
  if (lattice.shortest() < kCuspGuard) {
    throw CuspError("siegel_transform: lambda_1 = " + numeric::format_double(lattice.shortest()) +
                    " is below the cusp guard");
  }
  double radius = 0.0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    out[i] = 0.0;
    radius = std::max(radius, fs[i].radius);
  }
  enumerate(lattice.reduced(), radius * radius, [&](double len2) {
    const double r = std::sqrt(len2);
    for (std::size_t i = 0; i < fs.size(); ++i) out[i] += fs[i](r);
  });
}

std::size_t count_lattice_points(const UnimodularLattice& lattice, double radius) {
  if (lattice.shortest() < kCuspGuard) throw CuspError("count_lattice_points: cusp guard");
  std::size_t count = 0;
  enumerate(lattice.reduced(), radius * radius, [&](double) { ++count; });
  return count;
}

std::size_t brute_force_count(const Matrix<double>& g, double radius, int bound) {
  const std::size_t n = g.dim();
  std::size_t count = 0;
  std::array<int, 3> x{};
  const int span = 2 * bound + 1;
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= static_cast<std::size_t>(span);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    bool zero = true;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<int>(rest % static_cast<std::size_t>(span)) - bound;
      rest /= static_cast<std::size_t>(span);
      zero = zero && x[i] == 0;
    }
    if (zero) continue;
    double len2 = 0;
    for (std::size_t r = 0; r < n; ++r) {
      double c = 0;
      for (std::size_t j = 0; j < n; ++j) c += g(r, j) * x[j];
      len2 += c * c;
    }
    if (len2 <= radius * radius * (1.0 + 2.0 * kBoundaryTolerance)) ++count;
  }
  return count;
}

double haar_expectation(const TestFunction& f, std::size_t n) {
  if (n != 2 && n != 3) throw DimensionError("haar_expectation: N must be 2 or 3");
  const double pi = std::numbers::pi;
  const double R = f.radius;
  if (f.kind == TestKind::indicator_ball) {
    return n == 2 ? pi * R * R : 4.0 / 3.0 * pi * R * R * R;
  }
  const double sphere = n == 2 ? 2.0 * pi : 4.0 * pi;
  const auto integrand = [&](double r) { return f(r) * std::pow(r, static_cast<double>(n - 1)); };
  const double radial =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, R, 15, 1e-12);
  return sphere * radial;
}

Matrix<double> haar_sample_matrix(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t state = stream_seed(seed, index);
  auto draw = [&] {
    state = splitmix64(state);
    return unit_double(state);
  };
  const double ymin = std::sqrt(3.0) / 2.0;
  double x = 0, y = 0;
  do {
    y = ymin / (1.0 - draw());
    x = draw() - 0.5;
  } while (x * x + y * y < 1.0);
  const double angle = 2.0 * std::numbers::pi * draw();
  const double c = std::cos(angle), s = std::sin(angle);
  const double ry = std::sqrt(y);
  const Matrix<double> k{{c, -s}, {s, c}};
  const Matrix<double> shape{{1.0 / ry, x / ry}, {0.0, ry}};
  return k * shape;
}

std::vector<UnimodularLattice> haar_sample(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw PreconditionError("haar_sample: n must be positive");
  std::vector<UnimodularLattice> out(n);
  parallel_fill(out, [&](std::size_t i) { return reduce_basis(haar_sample_matrix(seed, i)); });
  return out;
}

bool in_compact(const UnimodularLattice& lattice, double eps0) {
  return lattice.shortest() >= eps0;
}

}  // namespace flowlab
