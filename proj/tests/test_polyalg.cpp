#include <doctest.h>

#include <cmath>
#include <random>

#include "flowlab/genpoly.hpp"
#include "flowlab/polymatrix.hpp"

using namespace flowlab;

namespace {

GenPoly P(const char* text) { return GenPoly::parse(text); }

GenPoly random_poly(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nterms(0, 4), coef(-5, 5), e(0, 3), te(-4, 6), den(1, 3);
  const Var vars[] = {Var::a1, Var::x, Var::y, Var::s};
  GenPoly out;
  const int n = nterms(rng);
  for (int i = 0; i < n; ++i) {
    Monomial m;
    for (Var v : vars) m[v] = Exponent(e(rng));
    m[Var::t] = Exponent(te(rng), den(rng));
    out += GenPoly::term(Rational(coef(rng), den(rng)), m);
  }
  return out;
}

}  // namespace

TEST_CASE("multiply adds t exponents") {
  const PolyMatrix a{{P("t^1/2")}};
  CHECK(multiply(a, a) == PolyMatrix{{P("t")}});
}

TEST_CASE("identity is neutral") {
  const auto m = PolyMatrix::parse("[[1 + x*y, x], [y, 1]]");
  CHECK(PolyMatrix::identity(2) * m == m);
  CHECK(m * PolyMatrix::identity(2) == m);
}

TEST_CASE("unipotent times its inverse") {
  const auto a = PolyMatrix::parse("[[1, a1*t^5/2], [0, 1]]");
  const auto b = PolyMatrix::parse("[[1, -a1*t^5/2], [0, 1]]");
  CHECK((a * b).is_identity());
}

TEST_CASE("dimension mismatch throws") {
  CHECK_THROWS_AS(PolyMatrix::identity(2) * PolyMatrix::identity(3), DimensionError);
}

TEST_CASE("power rule") {
  CHECK(differentiate(P("t^5/2"), Var::t) == P("5/2*t^3/2"));
  CHECK(differentiate(P("7"), Var::t).is_zero());
  CHECK(differentiate(P("a1*t^5/2"), Var::t) == P("5/2*a1*t^3/2"));
}

TEST_CASE("degrees") {
  CHECK(degree_in(P("t^3/2 + 2*t"), Var::t) == Degree(Exponent(3, 2)));
  CHECK(degree_in(GenPoly(), Var::t).is_neg_infinity());
  CHECK(degree_in(P("a1^2"), Var::t) == Degree(Exponent(0)));
  CHECK(Degree::neg_infinity() < Degree(Exponent(-100)));
}

TEST_CASE("substitution") {
  const auto m = PolyMatrix::parse("[[1, x], [0, 1]]");
  const Bindings b{{Var::x, P("a1*t^5/2")}};
  CHECK(substitute(m, b) == PolyMatrix::parse("[[1, a1*t^5/2], [0, 1]]"));
  CHECK(substitute(P("t^2 + x"), {{Var::t, P("t")}}) == P("t^2 + x"));
  CHECK(substitute(P("x*y"), {{Var::x, P("a1*t")}, {Var::y, P("a2*t^2")}}) == P("a1*a2*t^3"));
  CHECK_THROWS_AS(substitute(P("t^1/2"), {{Var::t, P("x + 1")}}), DomainError);
}

TEST_CASE("floating evaluation") {
  CHECK(evaluate(P("t^3/2"), make_point<double>({{Var::t, 4.0}})) == doctest::Approx(8.0));
  CHECK(evaluate(P("a1*t"), make_point<double>({{Var::a1, 2.0}, {Var::t, 3.0}})) ==
        doctest::Approx(6.0));
  CHECK_THROWS_AS(evaluate(P("t^-1"), make_point<double>({{Var::t, 0.0}})), DomainError);
}

TEST_CASE("inverse of SL matrices") {
  CHECK(matrix_inverse_sl(PolyMatrix::parse("[[1, a1*t^5/2], [0, 1]]")) ==
        PolyMatrix::parse("[[1, -a1*t^5/2], [0, 1]]"));
  CHECK(matrix_inverse_sl(PolyMatrix::identity(3)).is_identity());
  const auto m = PolyMatrix::parse("[[1 + x*y, x], [y, 1]]");
  CHECK(matrix_inverse_sl(m) == PolyMatrix::parse("[[1, -x], [-y, 1 + x*y]]"));
  CHECK((m * matrix_inverse_sl(m)).is_identity());
  CHECK_THROWS_AS(matrix_inverse_sl(PolyMatrix::parse("[[2, 0], [0, 1]]")), DomainError);
}

TEST_CASE("limit in t") {
  const auto lim = limit_t_to_infinity(P("5/2*a1 + a1*t^-5/2"));
  CHECK(lim.limit == P("5/2*a1"));
  CHECK(lim.remainder == P("a1*t^-5/2"));
  CHECK(limit_t_to_infinity(P("3")).limit == P("3"));
  CHECK_THROWS_AS(limit_t_to_infinity(P("a1*t")), DomainError);
}

TEST_CASE("text round trip") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const GenPoly p = random_poly(rng);
    CHECK(GenPoly::parse(p.to_string()) == p);
  }
  const auto m = PolyMatrix::parse("[[1 + x^2*y + x*y^4, x^2 + x*y^3], [y, 1]]");
  CHECK(PolyMatrix::parse(m.to_string()) == m);
  CHECK_THROWS_AS(GenPoly::parse("x^1/2"), ParseError);
  CHECK_THROWS_AS(GenPoly::parse("2 * * x"), ParseError);
}

TEST_CASE("ring laws on random polynomials") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 150; ++i) {
    const GenPoly a = random_poly(rng), b = random_poly(rng), c = random_poly(rng);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a * b == b * a);
    CHECK(differentiate(a + b, Var::t) == differentiate(a, Var::t) + differentiate(b, Var::t));
    CHECK(differentiate(a * b, Var::x) ==
          differentiate(a, Var::x) * b + a * differentiate(b, Var::x));
    if (!a.is_zero() && !b.is_zero()) {
      CHECK(degree_in(a * b, Var::t) == degree_in(a, Var::t) + degree_in(b, Var::t));
    }
    const GenPoly ab = a * b;
    for (const auto& [m, coef] : ab.terms()) CHECK(coef != 0);
  }
}

TEST_CASE("substitution commutes with evaluation") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> num(1, 9), den(1, 7);
  for (int i = 0; i < 100; ++i) {
    const GenPoly p = random_poly(rng);
    const Rational a(num(rng), den(rng)), t(num(rng), den(rng));
    const GenPoly bound = substitute(p, {{Var::x, P("a1*t^3/2")}, {Var::y, P("t")}});
    const double direct = evaluate(
        bound, make_point<double>({{Var::a1, a.get_d()}, {Var::t, t.get_d()}, {Var::s, 0.5}}));
    const double composed =
        evaluate(p, make_point<double>({{Var::a1, a.get_d()},
                                        {Var::x, a.get_d() * std::pow(t.get_d(), 1.5)},
                                        {Var::y, t.get_d()},
                                        {Var::t, t.get_d()},
                                        {Var::s, 0.5}}));
    CHECK(direct == doctest::Approx(composed).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("determinant of catalog-style maps") {
  CHECK(determinant(PolyMatrix::parse("[[1 + x^3, x^2], [x, 1]]")) == GenPoly(1));
  CHECK(determinant(PolyMatrix::parse("[[1, x, 1/2*x^2 + y], [0, 1, x], [0, 0, 1]]")) ==
        GenPoly(1));
}
