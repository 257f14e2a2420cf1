#include "flowlab/flowlimit.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "flowlab/numeric.hpp"

namespace flowlab {

namespace {

constexpr int kMaxOrder = 256;

bool is_integer(const Exponent& e) { return e.denominator() == 1; }

bool has_fractional_t_exponent(const PolyMatrix& m) {
  for (const auto& entry : m.entries()) {
    for (const auto& [mono, coef] : entry.terms()) {
      if (!is_integer(mono[Var::t])) return true;
    }
  }
  return false;
}

bool compliant(std::span<const Exponent> lambda) {
  bool fractional = false;
  for (const auto& l : lambda) {
    if (l <= 1) return false;
    if (!is_integer(l)) fractional = true;
  }
  return fractional;
}

std::vector<Exponent> scaled(std::span<const Exponent> lambda, const Exponent& c) {
  std::vector<Exponent> out;
  out.reserve(lambda.size());
  for (const auto& l : lambda) out.push_back(l * c);
  return out;
}

void require_positive(std::span<const Exponent> lambda) {
  if (lambda.empty()) throw PreconditionError("box exponents: empty vector");
  for (const auto& l : lambda) {
    if (l <= 0) {
      throw PreconditionError("box exponents must be positive, got " + exponent_to_string(l));
    }
  }
}

GenPoly t_power(const Exponent& e) { return GenPoly::variable(Var::t, e); }

Rational factorial(int n) {
  Rational f(1);
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Lazily differentiated copies of a map in one variable, and their products
// with a fixed right factor.
class DerivativeTower {
 public:
  DerivativeTower(PolyMatrix base, PolyMatrix right, Var var)
      : var_(var), right_(std::move(right)) {
    derivs_.push_back(std::move(base));
  }

  const PolyMatrix& derivative(int l) {
    while (static_cast<int>(derivs_.size()) <= l) {
      derivs_.push_back(differentiate(derivs_.back(), var_));
    }
    return derivs_[static_cast<std::size_t>(l)];
  }

  const PolyMatrix& times_right(int l) {
    while (static_cast<int>(products_.size()) <= l) {
      const int next = static_cast<int>(products_.size());
      products_.push_back(multiply(derivative(next), right_));
    }
    return products_[static_cast<std::size_t>(l)];
  }

  Degree product_degree(int l) { return degree_in(times_right(l), var_); }

 private:
  Var var_;
  PolyMatrix right_;
  std::vector<PolyMatrix> derivs_;
  std::vector<PolyMatrix> products_;
};

// max_{1<=l<=d} deg(theta^(l) theta^-1) / l over the finite degrees.
Exponent critical_exponent(DerivativeTower& tower, int d) {
  std::optional<Exponent> best;
  for (int l = 1; l <= d; ++l) {
    const Degree deg = tower.product_degree(l);
    if (deg.is_neg_infinity()) continue;
    const Exponent candidate = deg.value() / l;
    if (!best || candidate > *best) best = candidate;
  }
  if (!best) throw InvariantError("critical exponent: every derivative product vanishes");
  return *best;
}

}  // namespace

NormalizedExponents normalize_exponents(std::span<const Exponent> lambda) {
  require_positive(lambda);
  for (std::int64_t j = 0;; ++j) {
    const Exponent c = Exponent(1) + Exponent(j, 4);
    auto candidate = scaled(lambda, c);
    if (compliant(candidate)) return {c, std::move(candidate)};
  }
}

PolyMatrix rescale(const PolyMatrix& theta_map, std::span<const Exponent> lambda) {
  require_positive(lambda);
  if (lambda.size() > 3) throw DimensionError("rescale: at most 3 box variables");
  for (Var v : {Var::t, Var::a1, Var::a2, Var::a3}) {
    if (theta_map.depends_on(v)) {
      throw PreconditionError("rescale: map already involves " + std::string(var_name(v)));
    }
  }
  for (std::size_t i = lambda.size(); i < 3; ++i) {
    if (theta_map.depends_on(coordinate_var(i))) {
      throw PreconditionError("rescale: map uses coordinate " +
                              std::string(var_name(coordinate_var(i))) +
                              " beyond the box dimension");
    }
  }
  std::map<Var, Rational> origin;
  Bindings bindings;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    origin[coordinate_var(i)] = 0;
    bindings[coordinate_var(i)] = GenPoly::variable(alpha_var(i)) * t_power(lambda[i]);
  }
  if (!evaluate_exact(theta_map, origin).is_identity()) {
    throw PreconditionError("rescale: Theta(0) = " + evaluate_exact(theta_map, origin).to_string() +
                            " is not the identity");
  }
  return substitute(theta_map, bindings);
}

FlowResult compute_flow(const PolyMatrix& theta) {
  if (!theta.depends_on(Var::t)) throw PreconditionError("compute_flow: theta is constant in t");
  if (!has_fractional_t_exponent(theta)) {
    throw PreconditionError("compute_flow: theta needs a non-integer power of t");
  }
  FlowResult result;
  for (std::size_t i = 0; i < 3; ++i) {
    if (theta.depends_on(alpha_var(i))) result.box_dim = i + 1;
  }
  const PolyMatrix inverse = matrix_inverse_sl(theta);
  const Degree inverse_degree = degree_in(inverse, Var::t);
  const Degree theta_degree = degree_in(theta, Var::t);
  DerivativeTower tower(theta, inverse, Var::t);

  // d_1 = min{ l >= 1 : -oo < deg theta^(l+1) < 0 }
  int d = 0;
  for (int l = 1; l <= kMaxOrder; ++l) {
    const Degree deg = degree_in(tower.derivative(l + 1), Var::t);
    if (!deg.is_neg_infinity() && deg.value() < 0) {
      d = l;
      break;
    }
  }
  if (d == 0) throw InvariantError("compute_flow: no derivative of negative degree found");

  Exponent q = critical_exponent(tower, d);
  result.stages.push_back({d, q});
  if (q <= 0) throw InvariantError("compute_flow: critical exponent is not positive");

  // Degree test for theta^(d+1)(alpha, t + xi) theta^-1 t^(-q(d+1)), with xi
  // adjoined formally: its xi^j coefficient is theta^(d+1+j) theta^-1 t^(-q(d+1)) / j!.
  auto xi_degree_nonnegative = [&](int order, const Exponent& crit) {
    const Exponent shift = -crit * (order + 1);
    for (int j = 0;; ++j) {
      const Degree bound = theta_degree + inverse_degree + Exponent(shift - (order + 1 + j));
      if (bound.is_neg_infinity() || bound.value() < 0) return false;
      const Degree deg = tower.product_degree(order + 1 + j) + shift;
      if (!deg.is_neg_infinity() && deg.value() >= 0) return true;
      if (j > kMaxOrder) throw InvariantError("compute_flow: xi expansion did not terminate");
    }
  };

  while (xi_degree_nonnegative(d, q)) {
    ++d;
    if (d > kMaxOrder) throw InvariantError("compute_flow: order iteration did not terminate");
    q = critical_exponent(tower, d);
    result.stages.push_back({d, q});
  }
  result.q = q;
  result.d = d;

  for (int l = 1; l <= d; ++l) {
    const PolyMatrix scaled_product = t_power(-q * l) * tower.times_right(l);
    MatrixTLimit lim;
    try {
      lim = limit_t_to_infinity(scaled_product);
    } catch (const DomainError& err) {
      throw InvariantError(std::string("compute_flow: M_") + std::to_string(l) +
                           " diverges: " + err.what());
    }
    for (const auto& entry : lim.limit.entries()) {
      if (!entry.is_zero()) result.degenerate_locus.push_back(entry);
    }
    result.limits.push_back(std::move(lim.limit));
  }
  result.generator = result.limits.front();
  return result;
}

PolyMatrix flow_of(const FlowResult& result, Var s) {
  const std::size_t n = result.generator.dim();
  PolyMatrix rho = PolyMatrix::identity(n);
  for (std::size_t l = 1; l <= result.limits.size(); ++l) {
    const GenPoly weight =
        GenPoly::variable(s, Exponent(static_cast<std::int64_t>(l))) *
        GenPoly(Rational(1) / factorial(static_cast<int>(l)));
    rho = rho + weight * result.limits[l - 1];
  }
  return rho;
}

bool outside_degenerate_locus(const FlowResult& result, std::span<const Rational> alpha) {
  std::map<Var, Rational> point;
  for (std::size_t i = 0; i < alpha.size(); ++i) point[alpha_var(i)] = alpha[i];
  for (const auto& poly : result.degenerate_locus) {
    if (!evaluate_exact(poly, point).is_zero()) return true;
  }
  return false;
}

Matrix<double> nilpotent_exp(const Matrix<double>& y, double s) {
  const std::size_t n = y.dim();
  Matrix<double> power = Matrix<double>::identity(n);
  Matrix<double> sum = Matrix<double>::identity(n);
  double factorial_j = 1.0;
  for (std::size_t j = 1; j < n; ++j) {
    power = power * y;
    factorial_j *= static_cast<double>(j);
    sum = sum + (std::pow(s, static_cast<double>(j)) / factorial_j) * power;
  }
  power = power * y;
  if (max_abs_entry(power) >= 1e-9) {
    throw DomainError("nilpotent_exp: Y^N has max entry " +
                      numeric::format_double(max_abs_entry(power)));
  }
  return sum;
}

GroupLawReport group_law_check(const FlowResult& result, std::size_t trials, std::uint64_t seed) {
  GroupLawReport report;
  report.trials = trials;
  const std::size_t n = result.generator.dim();
  const PolyMatrix rho = flow_of(result, Var::s);
  const PolyMatrix rho_sum =
      substitute(rho, {{Var::s, GenPoly::variable(Var::s1) + GenPoly::variable(Var::s2)}});
  const PolyMatrix rho1 = substitute(rho, {{Var::s, GenPoly::variable(Var::s1)}});
  const PolyMatrix rho2 = substitute(rho, {{Var::s, GenPoly::variable(Var::s2)}});
  report.symbolic_group_law = rho_sum == multiply(rho1, rho2);
  if (!report.symbolic_group_law) {
    report.failures.push_back("rho(s1+s2) != rho(s1) rho(s2)");
  }
  report.generator_is_m1 = !result.limits.empty() && result.generator == result.limits.front();
  if (!report.generator_is_m1) report.failures.push_back("Y != M_1");

  PolyMatrix power = PolyMatrix::identity(n);
  for (std::size_t j = 0; j < n; ++j) power = multiply(power, result.generator);
  report.generator_nilpotent = power.is_zero();
  if (!report.generator_nilpotent) report.failures.push_back("Y^N != 0");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> numerator(0, 64);
  std::uniform_int_distribution<int> s_numerator(-128, 128);
  report.exp_agreement = true;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::map<Var, Rational> exact;
    Point<double> point{};
    for (std::size_t i = 0; i < result.box_dim; ++i) {
      const Rational a(numerator(rng), 64);
      exact[alpha_var(i)] = a;
      point[static_cast<std::size_t>(alpha_var(i))] = a.get_d();
    }
    const double s = Rational(s_numerator(rng), 64).get_d();
    point[static_cast<std::size_t>(Var::s)] = s;
    const Matrix<double> y = evaluate(evaluate_exact(result.generator, exact), point);
    Matrix<double> via_exp;
    try {
      via_exp = nilpotent_exp(y, s);
    } catch (const DomainError& err) {
      report.exp_agreement = false;
      report.failures.push_back(std::string("trial ") + std::to_string(trial) + ": " + err.what());
      continue;
    }
    const Matrix<double> direct = evaluate(rho, point);
    const double dev = max_abs_entry(direct - via_exp);
    report.max_exp_deviation = std::max(report.max_exp_deviation, dev);
    if (dev > 1e-9) {
      report.exp_agreement = false;
      report.failures.push_back("trial " + std::to_string(trial) + ": exp(sY) deviates by " +
                                numeric::format_double(dev));
    }
  }
  return report;
}

double limit_residual(const PolyMatrix& theta, const FlowResult& result,
                      std::span<const double> alpha, double s, double t) {
  if (!(t > 0)) throw DomainError("limit_residual: t must be positive");
  if (alpha.size() < result.box_dim) throw DimensionError("limit_residual: alpha too short");
  Point<high_real> here{};
  Point<high_real> shifted{};
  Point<high_real> flow_point{};
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const auto slot = static_cast<std::size_t>(alpha_var(i));
    here[slot] = shifted[slot] = flow_point[slot] = high_real(alpha[i]);
  }
  const high_real big_t(t);
  const high_real s_hp(s);
  const high_real shift = s_hp * numeric::rational_pow(big_t, -result.q.numerator(),
                                                       result.q.denominator());
  here[static_cast<std::size_t>(Var::t)] = big_t;
  shifted[static_cast<std::size_t>(Var::t)] = big_t + shift;
  flow_point[static_cast<std::size_t>(Var::s)] = s_hp;

  const PolyMatrix inverse = matrix_inverse_sl(theta);
  const Matrix<high_real> lhs = evaluate(theta, shifted) * evaluate(inverse, here);
  const Matrix<high_real> rho = evaluate(flow_of(result, Var::s), flow_point);
  high_real worst(0);
  for (std::size_t i = 0; i < lhs.dim(); ++i) {
    for (std::size_t j = 0; j < lhs.dim(); ++j) {
      const high_real dev = abs(lhs(i, j) - rho(i, j));
      if (dev > worst) worst = dev;
    }
  }
  return numeric::to_double(worst);
}

PreparedFlow prepare_flow(const PolyMatrix& theta_map, std::span<const Exponent> lambda) {
  require_positive(lambda);
  NormalizedExponents norm = normalize_exponents(lambda);
  PolyMatrix theta = rescale(theta_map, norm.lambda);
  // Continue the same scale search until some t-power of theta is fractional.
  std::int64_t j = (norm.scale - 1).numerator() * 4 / (norm.scale - 1).denominator();
  while (!has_fractional_t_exponent(theta)) {
    ++j;
    if (j > 4 * kMaxOrder) throw PreconditionError("prepare_flow: no admissible rescaling");
    const Exponent c = Exponent(1) + Exponent(j, 4);
    auto candidate = scaled(lambda, c);
    if (!compliant(candidate)) continue;
    norm = {c, std::move(candidate)};
    theta = rescale(theta_map, norm.lambda);
  }
  FlowResult flow = compute_flow(theta);
  return {std::move(norm), std::move(theta), std::move(flow)};
}

// ------------------------------------------------------------ two variables

PolyMatrix symbolic_nilpotent_exp(const PolyMatrix& nilpotent, Var s) {
  const std::size_t n = nilpotent.dim();
  PolyMatrix power = PolyMatrix::identity(n);
  PolyMatrix sum = PolyMatrix::identity(n);
  for (std::size_t j = 1; j < n; ++j) {
    power = multiply(power, nilpotent);
    const GenPoly weight = GenPoly::variable(s, Exponent(static_cast<std::int64_t>(j))) *
                           GenPoly(Rational(1) / factorial(static_cast<int>(j)));
    sum = sum + weight * power;
  }
  if (!multiply(power, nilpotent).is_zero()) {
    throw DomainError("symbolic_nilpotent_exp: matrix is not nilpotent");
  }
  return sum;
}

TwoDimFlowResult twodim_flow(const PolyMatrix& theta_map) {
  for (Var v : {Var::t, Var::z, Var::a1, Var::a2, Var::a3}) {
    if (theta_map.depends_on(v)) {
      throw PreconditionError("twodim_flow: map must be in x and y only, found " +
                              std::string(var_name(v)));
    }
  }
  if (degree_in(theta_map, Var::x) <= Degree(Exponent(0))) {
    throw PreconditionError("twodim_flow: deg_x(Theta) must be positive");
  }
  if (!evaluate_exact(theta_map, {{Var::x, 0}, {Var::y, 0}}).is_identity()) {
    throw PreconditionError("twodim_flow: Theta(0,0) is not the identity");
  }
  // x plays the asymptotic role; run the calculus in t and rename back.
  const PolyMatrix big = rename(theta_map, Var::x, Var::t);
  const PolyMatrix inverse = matrix_inverse_sl(big);
  DerivativeTower tower(big, inverse, Var::t);

  TwoDimFlowResult out;
  out.d0 = static_cast<int>(degree_in(big, Var::t).value().numerator());
  out.q = critical_exponent(tower, out.d0);
  if (out.q < 0) out.q = 0;

  for (int l = 1; l <= out.d0; ++l) {
    auto lim = limit_t_to_infinity(t_power(-out.q * l) * tower.times_right(l));
    out.lambda_l.push_back(rename(lim.limit, Var::t, Var::x));
  }
  out.lambda_of_y = out.lambda_l.front();
  if (out.lambda_of_y.is_zero()) throw InvariantError("twodim_flow: lambda(y) vanishes");
  out.d = static_cast<int>(degree_in(out.lambda_of_y, Var::y).value().numerator());
  out.lambda0 = PolyMatrix(out.lambda_of_y.dim());
  for (std::size_t i = 0; i < out.lambda0.dim(); ++i) {
    for (std::size_t j = 0; j < out.lambda0.dim(); ++j) {
      out.lambda0(i, j) = coefficient_of(out.lambda_of_y(i, j), Var::y, Exponent(out.d));
    }
  }
  out.rho = symbolic_nilpotent_exp(out.lambda0, Var::s);

  const PolyMatrix first = tower.times_right(1);
  out.p = static_cast<int>(degree_in(first, Var::y).value().numerator());
  out.b = Exponent(out.p + 1);

  const PolyMatrix normalized = t_power(-out.q) * first;
  std::vector<std::pair<Exponent, Exponent>> ratios;
  for (const auto& entry : normalized.entries()) {
    for (const auto& [mono, coef] : entry.terms()) {
      const Exponent r = -mono[Var::t];
      const Exponent ty = mono[Var::y];
      if (r != 0 && ty >= 0) ratios.emplace_back(ty, r);
    }
  }
  std::sort(ratios.begin(), ratios.end());
  ratios.erase(std::unique(ratios.begin(), ratios.end()), ratios.end());
  out.ratio_set = ratios;
  for (const auto& pr : ratios) {
    if (!out.dominant_ratio ||
        pr.first / pr.second > out.dominant_ratio->first / out.dominant_ratio->second) {
      out.dominant_ratio = pr;
    }
  }
  return out;
}

double twodim_residual(const PolyMatrix& theta_map, const TwoDimFlowResult& result, double s,
                       double x, double y) {
  if (!(x > 0) || !(y > 0)) throw DomainError("twodim_residual: x and y must be positive");
  const high_real hx(x), hy(y), hs(s);
  const high_real step = hs * numeric::rational_pow(hy, -result.d, 1) *
                         numeric::rational_pow(hx, -result.q.numerator(), result.q.denominator());
  const Matrix<high_real> base =
      evaluate(theta_map, make_point<high_real>({{Var::x, hx}, {Var::y, hy}}));
  const Matrix<high_real> moved =
      evaluate(theta_map, make_point<high_real>({{Var::x, hx + step}, {Var::y, hy}}));
  const Matrix<high_real> rho = evaluate(result.rho, make_point<high_real>({{Var::s, hs}}));
  const Matrix<high_real> lhs = rho * base;
  high_real worst(0);
  for (std::size_t i = 0; i < lhs.dim(); ++i) {
    for (std::size_t j = 0; j < lhs.dim(); ++j) {
      const high_real dev = abs(lhs(i, j) - moved(i, j));
      if (dev > worst) worst = dev;
    }
  }
  return numeric::to_double(worst);
}

double twodim_flow_defect(const PolyMatrix& theta_map, const TwoDimFlowResult& result, double s,
                          double x, double y) {
  if (!(x > 0) || !(y > 0)) throw DomainError("twodim_flow_defect: x and y must be positive");
  const high_real hx(x), hy(y), hs(s);
  const high_real step = hs * numeric::rational_pow(hy, -result.d, 1) *
                         numeric::rational_pow(hx, -result.q.numerator(), result.q.denominator());
  const Matrix<high_real> base =
      evaluate(theta_map, make_point<high_real>({{Var::x, hx}, {Var::y, hy}}));
  const Matrix<high_real> moved =
      evaluate(theta_map, make_point<high_real>({{Var::x, hx + step}, {Var::y, hy}}));
  const Matrix<high_real> rho = evaluate(result.rho, make_point<high_real>({{Var::s, hs}}));
  const Matrix<high_real> diff = moved * inverse_unimodular(base) - rho;
  return numeric::to_double(max_abs_entry(diff));
}

// ------------------------------------------------------------ rendering

std::string describe(const FlowResult& result) {
  std::ostringstream out;
  out << "q = " << exponent_to_string(result.q) << "\n";
  out << "d = " << result.d << "\n";
  out << "stages =";
  for (const auto& st : result.stages) out << " (" << st.d << ", " << exponent_to_string(st.q) << ")";
  out << "\n";
  for (std::size_t l = 0; l < result.limits.size(); ++l) {
    out << "M_" << (l + 1) << " = " << result.limits[l].to_string() << "\n";
  }
  out << "Y = " << result.generator.to_string() << "\n";
  out << "rho(s) = " << flow_of(result).to_string() << "\n";
  out << "degenerate_locus = {";
  for (std::size_t i = 0; i < result.degenerate_locus.size(); ++i) {
    out << (i ? ", " : "") << result.degenerate_locus[i].to_string() << " = 0";
  }
  out << "}\n";
  return out.str();
}

std::string describe(const TwoDimFlowResult& result) {
  std::ostringstream out;
  out << "q = " << exponent_to_string(result.q) << "\n";
  out << "d0 = " << result.d0 << "\n";
  out << "lambda(y) = " << result.lambda_of_y.to_string() << "\n";
  out << "d = " << result.d << "\n";
  out << "lambda0 = " << result.lambda0.to_string() << "\n";
  out << "rho(s) = " << result.rho.to_string() << "\n";
  out << "p = " << result.p << "\n";
  out << "b = " << exponent_to_string(result.b) << "\n";
  out << "A = {";
  for (std::size_t i = 0; i < result.ratio_set.size(); ++i) {
    out << (i ? ", " : "") << "(" << exponent_to_string(result.ratio_set[i].first) << ", "
        << exponent_to_string(result.ratio_set[i].second) << ")";
  }
  out << "}\n";
  out << "dominant_ratio = ";
  if (result.dominant_ratio) {
    out << "(" << exponent_to_string(result.dominant_ratio->first) << ", "
        << exponent_to_string(result.dominant_ratio->second) << ")\n";
  } else {
    out << "ABSENT\n";
  }
  return out.str();
}

}  // namespace flowlab
