#include <doctest.h>

#include <cmath>
#include <vector>

#include "flowlab/flowlimit.hpp"

using namespace flowlab;

namespace {

GenPoly P(const char* text) { return GenPoly::parse(text); }
PolyMatrix M(const char* text) { return PolyMatrix::parse(text); }

std::vector<Exponent> L(std::initializer_list<Exponent> v) { return v; }

// Independent check of theta(t + s t^-q) theta(t)^-1 for the 5/2 map in
// closed form: alpha ((t + s t^-q)^(5/2) - t^(5/2)).
double heis52_entry(double alpha, double s, double t) {
  const double shifted = t + s * std::pow(t, -1.5);
  return alpha * (std::pow(shifted, 2.5) - std::pow(t, 2.5));
}

}  // namespace

TEST_CASE("rescale substitutes monomials") {
  const std::vector<Exponent> l52{Exponent(5, 2)};
  CHECK(rescale(M("[[1, x], [0, 1]]"), l52) == M("[[1, a1*t^5/2], [0, 1]]"));
  const std::vector<Exponent> l2{Exponent(3, 2), Exponent(1)};
  CHECK(rescale(M("[[1 + x*y, x], [y, 1]]"), l2) ==
        M("[[1 + a1*a2*t^5/2, a1*t^3/2], [a2*t, 1]]"));
  CHECK_THROWS_AS(rescale(M("[[2, x], [0, 1/2]]"), l52), PreconditionError);
}

TEST_CASE("normalize exponents on the quarter grid") {
  const auto a = normalize_exponents(L({Exponent(5, 2)}));
  CHECK(a.scale == Exponent(1));
  CHECK(a.lambda == L({Exponent(5, 2)}));
  const auto b = normalize_exponents(L({Exponent(2)}));
  CHECK(b.scale == Exponent(5, 4));
  CHECK(b.lambda == L({Exponent(5, 2)}));
  const auto c = normalize_exponents(L({Exponent(1), Exponent(1)}));
  CHECK(c.scale == Exponent(5, 4));
  const auto d = normalize_exponents(L({Exponent(1), Exponent(1, 2)}));
  CHECK(d.scale == Exponent(9, 4));
  CHECK(d.lambda == L({Exponent(9, 4), Exponent(9, 8)}));
  for (const auto& l : d.lambda) CHECK(l > 1);
  CHECK_THROWS_AS(normalize_exponents(L({Exponent(0)})), PreconditionError);
}

TEST_CASE("flow of the 5/2 map") {
  const PolyMatrix theta = M("[[1, a1*t^5/2], [0, 1]]");
  const FlowResult r = compute_flow(theta);
  CHECK(r.q == Exponent(3, 2));
  CHECK(r.d == 2);
  REQUIRE(r.limits.size() == 2);
  CHECK(r.limits[0] == M("[[0, 5/2*a1], [0, 0]]"));
  CHECK(r.limits[1].is_zero());
  CHECK(r.generator == r.limits[0]);
  REQUIRE(r.degenerate_locus.size() == 1);
  CHECK(r.degenerate_locus[0] == P("5/2*a1"));
  CHECK(flow_of(r) == M("[[1, 5/2*a1*s], [0, 1]]"));
  CHECK(r.q > 0);

  const Rational zero(0), one(1);
  CHECK_FALSE(outside_degenerate_locus(r, std::vector<Rational>{zero}));
  CHECK(outside_degenerate_locus(r, std::vector<Rational>{one}));

  const auto report = group_law_check(r, 100);
  CHECK(report.passed());
  CHECK(report.symbolic_group_law);
  CHECK(report.generator_is_m1);
}

TEST_CASE("constant map is rejected") {
  CHECK_THROWS_AS(compute_flow(M("[[1, a1], [0, 1]]")), PreconditionError);
}

TEST_CASE("corrupted flow fails the group law") {
  FlowResult r = compute_flow(M("[[1, a1*t^5/2], [0, 1]]"));
  r.limits[1] = M("[[0, a1], [0, 0]]");
  const auto report = group_law_check(r, 10);
  CHECK_FALSE(report.passed());
  CHECK_FALSE(report.symbolic_group_law);
}

TEST_CASE("identity flow passes") {
  FlowResult r;
  r.q = Exponent(1);
  r.d = 1;
  r.limits = {PolyMatrix(2)};
  r.generator = PolyMatrix(2);
  CHECK(flow_of(r).is_identity());
  CHECK(group_law_check(r, 5).passed());
}

TEST_CASE("flow_of with a single unipotent term") {
  FlowResult r;
  r.q = Exponent(1);
  r.d = 2;
  r.limits = {M("[[0, 1], [0, 0]]"), PolyMatrix(2)};
  r.generator = r.limits[0];
  CHECK(flow_of(r) == M("[[1, s], [0, 1]]"));
}

TEST_CASE("nilpotent exponential") {
  Matrix<double> y(2);
  y(0, 1) = 1.0;
  const auto e = nilpotent_exp(y, 3.0);
  CHECK(e(0, 0) == 1.0);
  CHECK(e(0, 1) == 3.0);
  CHECK(e(1, 0) == 0.0);
  CHECK(max_abs_entry(nilpotent_exp(Matrix<double>(3), 2.0) - Matrix<double>::identity(3)) == 0.0);
  Matrix<double> j(3);
  j(0, 1) = 1.0;
  j(1, 2) = 1.0;
  const auto f = nilpotent_exp(j, 1.0);
  CHECK(f(0, 2) == doctest::Approx(0.5));
  CHECK(f(0, 1) == 1.0);
  CHECK(f(1, 2) == 1.0);
  Matrix<double> bad(2);
  bad(0, 0) = 1.0;
  CHECK_THROWS_AS(nilpotent_exp(bad, 1.0), DomainError);
}

TEST_CASE("limit residual against the closed form") {
  const PolyMatrix theta = M("[[1, a1*t^5/2], [0, 1]]");
  const FlowResult r = compute_flow(theta);
  const double alpha[] = {1.0};
  const double t = 1e3;
  const double residual = limit_residual(theta, r, alpha, 1.0, t);
  CHECK(residual == doctest::Approx(std::abs(heis52_entry(1.0, 1.0, t) - 2.5)).epsilon(1e-3));
  CHECK(residual <= 2.0 * std::pow(t, -2.5));
  CHECK(limit_residual(theta, r, alpha, 0.0, t) < 1e-25);
  double prev = 1e300;
  for (double tt : {1e2, 1e3, 1e4, 1e5}) {
    const double now = limit_residual(theta, r, alpha, 2.0, tt);
    CHECK(now < prev);
    prev = now;
  }
  CHECK_THROWS_AS(limit_residual(theta, r, alpha, 1.0, 0.0), DomainError);
}

TEST_CASE("prepare_flow on the product map") {
  const std::vector<Exponent> lambda{Exponent(1), Exponent(1, 2)};
  const PreparedFlow pf = prepare_flow(M("[[1 + x*y, x], [y, 1]]"), lambda);
  CHECK(pf.normalization.scale == Exponent(9, 4));
  CHECK(pf.flow.q == Exponent(37, 8));
  CHECK(pf.flow.d == 3);
  CHECK(pf.flow.limits[0] == M("[[0, -9/8*a1^2*a2], [0, 0]]"));
  CHECK(group_law_check(pf.flow, 50).passed());
  const double alpha[] = {0.7, 0.4};
  const double r2 = limit_residual(pf.theta, pf.flow, alpha, 2.0, 1e2);
  const double r4 = limit_residual(pf.theta, pf.flow, alpha, 2.0, 1e4);
  CHECK(r4 < r2);
  CHECK(r4 < 1e-4);
}

TEST_CASE("two-variable flows") {
  SUBCASE("x y shear") {
    const auto r = twodim_flow(M("[[1, x*y], [0, 1]]"));
    CHECK(r.q == Exponent(0));
    CHECK(r.lambda_of_y == M("[[0, y], [0, 0]]"));
    CHECK(r.d == 1);
    CHECK(r.lambda0 == M("[[0, 1], [0, 0]]"));
    CHECK(r.rho == M("[[1, s], [0, 1]]"));
    CHECK(r.p == 1);
    CHECK(r.b == Exponent(2));
    CHECK(r.ratio_set.empty());
    CHECK_FALSE(r.dominant_ratio.has_value());
    for (double x : {0.5, 3.0, 40.0}) {
      CHECK(twodim_residual(M("[[1, x*y], [0, 1]]"), r, 1.0, x, 2.0) < 1e-25);
    }
  }
  SUBCASE("product of opposite unipotents") {
    const auto r = twodim_flow(M("[[1 + x*y, x], [y, 1]]"));
    CHECK(r.q == Exponent(0));
    CHECK(r.d == 0);
    CHECK(r.lambda0 == M("[[0, 1], [0, 0]]"));
    CHECK(r.p == 0);
    CHECK(r.b == Exponent(1));
    CHECK(r.ratio_set.empty());
  }
  SUBCASE("quadratic shear") {
    const PolyMatrix theta = M("[[1, x^2 + x*y^3], [0, 1]]");
    const auto r = twodim_flow(theta);
    CHECK(r.q == Exponent(1));
    CHECK(r.lambda0 == M("[[0, 2], [0, 0]]"));
    CHECK(r.rho == M("[[1, 2*s], [0, 1]]"));
    CHECK(r.p == 3);
    CHECK(r.b == Exponent(4));
    REQUIRE(r.ratio_set.size() == 1);
    CHECK(r.ratio_set[0] == std::pair{Exponent(3), Exponent(1)});
    REQUIRE(r.dominant_ratio.has_value());
    CHECK(*r.dominant_ratio == std::pair{Exponent(3), Exponent(1)});
    double prev = 1e300;
    for (double n : {10.0, 100.0, 1000.0}) {
      const double now = twodim_residual(theta, r, 1.0, std::pow(n, 4), n);
      CHECK(now < prev);
      prev = now;
    }
    CHECK(twodim_residual(theta, r, 0.0, 5.0, 2.0) == 0.0);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(twodim_flow(M("[[1, y], [0, 1]]")), PreconditionError);
    CHECK_THROWS_AS(twodim_flow(M("[[2, x], [0, 1/2]]")), PreconditionError);
  }
}

TEST_CASE("flow defect removes the size of Theta") {
  const PolyMatrix theta = M("[[1 + x^2*y + x*y^4, x^2 + x*y^3], [y, 1]]");
  const auto r = twodim_flow(theta);
  CHECK(r.p == 3);
  double prev = 1e300;
  for (double n : {10.0, 100.0, 1000.0}) {
    const double x = 1.01 * std::pow(n, 4);
    const double now = twodim_flow_defect(theta, r, 1.0, x, n);
    // Closed form: y^3 / x + 1 / x^2 for s = 1.
    CHECK(now == doctest::Approx(n * n * n / x + 1.0 / (x * x)).epsilon(1e-6));
    CHECK(now < prev);
    prev = now;
  }
}
