#pragma once

// Exact generalized polynomials: rational coefficients, rational exponents in
// the distinguished variable t, nonnegative integer exponents elsewhere.

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <boost/rational.hpp>
#include <gmpxx.h>

#include "flowlab/error.hpp"
#include "flowlab/numeric.hpp"

namespace flowlab {

/// Fixed variable alphabet. The enumeration order is the canonical term order.
enum class Var : std::uint8_t { a1, a2, a3, t, x, y, z, s, s1, s2, xi, v1, v2, v3 };

inline constexpr std::size_t kVarCount = 14;

std::string_view var_name(Var v);
std::optional<Var> var_from_name(std::string_view name);

/// Box-shape variable alpha_{i+1}; i < 3.
Var alpha_var(std::size_t i);
/// Map coordinate x, y, z for i = 0, 1, 2.
Var coordinate_var(std::size_t i);
/// Coordinate v_{i+1} of the representation space; i < 3.
Var vector_var(std::size_t i);

using Rational = mpq_class;
using Exponent = boost::rational<std::int64_t>;

}  // namespace flowlab

// Boost 1.74 forwards `int == rational` to `rational == int`, which C++20
// rewrites back into the same call. Exact-match overloads break the cycle.
namespace boost {
inline constexpr bool operator==(const rational<std::int64_t>& a, int b) {
  return a.denominator() == 1 && a.numerator() == b;
}
inline constexpr bool operator==(int b, const rational<std::int64_t>& a) { return a == b; }
}  // namespace boost

namespace flowlab {

/// Degree of a polynomial in one variable. The zero polynomial has degree
/// negative infinity, which compares below every rational.
class Degree {
 public:
  constexpr Degree() = default;  // negative infinity
  explicit Degree(Exponent value) : value_(value) {}

  static Degree neg_infinity() { return Degree{}; }

  bool is_neg_infinity() const { return !value_.has_value(); }
  /// Throws DomainError on negative infinity.
  Exponent value() const;

  friend bool operator==(const Degree& a, const Degree& b) { return a.value_ == b.value_; }
  friend bool operator<(const Degree& a, const Degree& b);
  friend bool operator>(const Degree& a, const Degree& b) { return b < a; }
  friend bool operator<=(const Degree& a, const Degree& b) { return !(b < a); }
  friend bool operator>=(const Degree& a, const Degree& b) { return !(a < b); }

  /// Sum of degrees; negative infinity absorbs.
  friend Degree operator+(const Degree& a, const Degree& b);
  friend Degree operator+(const Degree& a, Exponent b);

  std::string to_string() const;

 private:
  std::optional<Exponent> value_;
};

/// Exponent vector over the alphabet. Ordered lexicographically in alphabet
/// order with exponents compared as rationals.
class Monomial {
 public:
  Monomial() { exps_.fill(Exponent(0)); }

  static Monomial single(Var v, Exponent e);

  const Exponent& operator[](Var v) const { return exps_[static_cast<std::size_t>(v)]; }
  Exponent& operator[](Var v) { return exps_[static_cast<std::size_t>(v)]; }

  bool is_one() const;
  Monomial operator*(const Monomial& other) const;

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps_ == b.exps_; }
  friend bool operator<(const Monomial& a, const Monomial& b);

 private:
  std::array<Exponent, kVarCount> exps_;
};

class GenPoly {
 public:
  using TermMap = std::map<Monomial, Rational>;

  GenPoly() = default;
  GenPoly(const Rational& c);  // NOLINT(google-explicit-constructor)
  GenPoly(long c) : GenPoly(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  GenPoly(int c) : GenPoly(Rational(c)) {}  // NOLINT(google-explicit-constructor)

  static GenPoly variable(Var v, Exponent e = Exponent(1));
  static GenPoly term(const Rational& c, const Monomial& m);
  /// Parses the text form produced by to_string(). Throws ParseError.
  static GenPoly parse(std::string_view text);

  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Coefficient of the empty monomial.
  Rational constant_term() const;
  bool depends_on(Var v) const;
  /// True when every stored term has a single coefficient and one monomial.
  bool is_monomial() const { return terms_.size() == 1; }

  GenPoly operator-() const;
  GenPoly& operator+=(const GenPoly& other);
  GenPoly& operator-=(const GenPoly& other);
  GenPoly& operator*=(const GenPoly& other) { return *this = *this * other; }

  friend GenPoly operator+(GenPoly a, const GenPoly& b) { return a += b; }
  friend GenPoly operator-(GenPoly a, const GenPoly& b) { return a -= b; }
  friend GenPoly operator*(const GenPoly& a, const GenPoly& b);
  friend bool operator==(const GenPoly& a, const GenPoly& b) { return a.terms_ == b.terms_; }

  GenPoly pow(unsigned n) const;

  /// Sum of terms `c * v1^e1 * ... * vn^en`, exponents as `p/q`.
  std::string to_string() const;

 private:
  void add_term(const Monomial& m, const Rational& c);

  TermMap terms_;
};

/// Term-by-term power rule in `var`.
GenPoly differentiate(const GenPoly& p, Var var);

/// Largest exponent of `var` over the stored terms.
Degree degree_in(const GenPoly& p, Var var);

/// Part of `p` whose exponent of `var` equals `e`, with `var` removed.
GenPoly coefficient_of(const GenPoly& p, Var var, Exponent e);

using Bindings = std::map<Var, GenPoly>;

/// Simultaneous substitution. A non-integer power of a bound variable is only
/// allowed when its binding is a unit-coefficient monomial and the result keeps
/// integer exponents outside t; otherwise throws DomainError.
GenPoly substitute(const GenPoly& p, const Bindings& bindings);

template <class Real>
using Point = std::array<std::optional<Real>, kVarCount>;

template <class Real>
Point<Real> make_point(std::initializer_list<std::pair<Var, Real>> values) {
  Point<Real> pt{};
  for (const auto& [v, r] : values) pt[static_cast<std::size_t>(v)] = r;
  return pt;
}

/// Floating evaluation. Terms are summed in canonical term order.
template <class Real>
Real evaluate(const GenPoly& p, const Point<Real>& point) {
  Real sum(0);
  for (const auto& [mono, coef] : p.terms()) {
    Real value = numeric::from_rational<Real>(coef);
    for (std::size_t i = 0; i < kVarCount; ++i) {
      const Exponent& e = mono[static_cast<Var>(i)];
      if (e == 0) continue;
      const auto& bound = point[i];
      if (!bound) {
        throw PreconditionError("evaluate: variable " +
                                std::string(var_name(static_cast<Var>(i))) + " is unbound");
      }
      const Real& base = *bound;
      if (e.denominator() == 1 && e.numerator() > 0) {
        value *= numeric::int_pow(base, static_cast<unsigned>(e.numerator()));
      } else {
        if (!(base > Real(0))) {
          throw DomainError("evaluate: " + std::string(var_name(static_cast<Var>(i))) +
                            " must be positive for exponent " + std::to_string(e.numerator()) +
                            "/" + std::to_string(e.denominator()));
        }
        value *= numeric::rational_pow(base, e.numerator(), e.denominator());
      }
    }
    sum += value;
  }
  return sum;
}

/// Exact evaluation; every exponent of a bound variable must be a nonnegative
/// integer. Unbound variables remain symbolic.
GenPoly evaluate_exact(const GenPoly& p, const std::map<Var, Rational>& point);

struct TLimit {
  GenPoly limit;      ///< t-free part
  GenPoly remainder;  ///< discarded terms of negative t-degree
};

/// Limit as t -> infinity of a polynomial of nonpositive t-degree.
/// Throws DomainError when the t-degree is positive.
TLimit limit_t_to_infinity(const GenPoly& p);

/// Swaps the roles of two variables (exponents are exchanged verbatim).
GenPoly rename(const GenPoly& p, Var from, Var to);

std::string exponent_to_string(const Exponent& e);
/// Accepts `p` or `p/q`.
Exponent parse_exponent(std::string_view text);
std::string rational_to_string(const Rational& r);

}  // namespace flowlab
