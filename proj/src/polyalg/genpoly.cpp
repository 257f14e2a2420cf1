#include "flowlab/genpoly.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>
#include <vector>

namespace flowlab {

namespace {

constexpr std::array<std::string_view, kVarCount> kVarNames = {
    "a1", "a2", "a3", "t", "x", "y", "z", "s", "s1", "s2", "xi", "v1", "v2", "v3"};

bool is_integer(const Exponent& e) { return e.denominator() == 1; }

}  // namespace

std::string_view var_name(Var v) { return kVarNames[static_cast<std::size_t>(v)]; }

std::optional<Var> var_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kVarCount; ++i) {
    if (kVarNames[i] == name) return static_cast<Var>(i);
  }
  return std::nullopt;
}

Var alpha_var(std::size_t i) {
  if (i >= 3) throw DimensionError("alpha_var: at most 3 box variables");
  return static_cast<Var>(static_cast<std::size_t>(Var::a1) + i);
}

Var coordinate_var(std::size_t i) {
  if (i >= 3) throw DimensionError("coordinate_var: at most 3 map coordinates");
  return static_cast<Var>(static_cast<std::size_t>(Var::x) + i);
}

Var vector_var(std::size_t i) {
  if (i >= 3) throw DimensionError("vector_var: at most 3 vector coordinates");
  return static_cast<Var>(static_cast<std::size_t>(Var::v1) + i);
}

// ---------------------------------------------------------------- Degree

Exponent Degree::value() const {
  if (!value_) throw DomainError("degree of the zero polynomial is -infinity");
  return *value_;
}

bool operator<(const Degree& a, const Degree& b) {
  if (a.is_neg_infinity()) return !b.is_neg_infinity();
  if (b.is_neg_infinity()) return false;
  return *a.value_ < *b.value_;
}

Degree operator+(const Degree& a, const Degree& b) {
  if (a.is_neg_infinity() || b.is_neg_infinity()) return Degree::neg_infinity();
  return Degree(*a.value_ + *b.value_);
}

Degree operator+(const Degree& a, Exponent b) {
  if (a.is_neg_infinity()) return a;
  return Degree(*a.value_ + b);
}

std::string Degree::to_string() const {
  return value_ ? exponent_to_string(*value_) : std::string("-inf");
}

// ---------------------------------------------------------------- Monomial

Monomial Monomial::single(Var v, Exponent e) {
  Monomial m;
  m[v] = e;
  return m;
}

bool Monomial::is_one() const {
  for (const auto& e : exps_) {
    if (e != 0) return false;
  }
  return true;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out;
  for (std::size_t i = 0; i < kVarCount; ++i) out.exps_[i] = exps_[i] + other.exps_[i];
  return out;
}

bool operator<(const Monomial& a, const Monomial& b) {
  for (std::size_t i = 0; i < kVarCount; ++i) {
    if (a.exps_[i] != b.exps_[i]) return a.exps_[i] < b.exps_[i];
  }
  return false;
}

// ---------------------------------------------------------------- GenPoly

GenPoly::GenPoly(const Rational& c) {
  Rational canonical(c);
  canonical.canonicalize();
  if (canonical != 0) terms_.emplace(Monomial{}, canonical);
}

GenPoly GenPoly::variable(Var v, Exponent e) {
  if (v != Var::t && (!is_integer(e) || e < 0)) {
    throw DomainError("variable " + std::string(var_name(v)) +
                      " admits only nonnegative integer exponents");
  }
  GenPoly p;
  p.terms_.emplace(Monomial::single(v, e), Rational(1));
  return p;
}

GenPoly GenPoly::term(const Rational& c, const Monomial& m) {
  for (std::size_t i = 0; i < kVarCount; ++i) {
    const auto v = static_cast<Var>(i);
    if (v != Var::t && (!is_integer(m[v]) || m[v] < 0)) {
      throw DomainError("variable " + std::string(var_name(v)) +
                        " admits only nonnegative integer exponents");
    }
  }
  GenPoly p;
  p.add_term(m, c);
  return p;
}

bool GenPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

Rational GenPoly::constant_term() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rational(0) : it->second;
}

bool GenPoly::depends_on(Var v) const {
  for (const auto& [m, c] : terms_) {
    if (m[v] != 0) return true;
  }
  return false;
}

void GenPoly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  Rational canonical(c);
  canonical.canonicalize();
  auto [it, inserted] = terms_.try_emplace(m, canonical);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

GenPoly GenPoly::operator-() const {
  GenPoly out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

GenPoly& GenPoly::operator+=(const GenPoly& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

GenPoly& GenPoly::operator-=(const GenPoly& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

GenPoly operator*(const GenPoly& a, const GenPoly& b) {
  GenPoly out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  }
  return out;
}

GenPoly GenPoly::pow(unsigned n) const {
  GenPoly result(1);
  GenPoly base = *this;
  while (n > 0) {
    if (n & 1U) result *= base;
    n >>= 1U;
    if (n > 0) base *= base;
  }
  return result;
}

std::string rational_to_string(const Rational& r) { return r.get_str(); }

std::string exponent_to_string(const Exponent& e) {
  if (e.denominator() == 1) return std::to_string(e.numerator());
  return std::to_string(e.numerator()) + "/" + std::to_string(e.denominator());
}

std::string GenPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [mono, coef] : terms_) {
    const bool negative = coef < 0;
    if (first) {
      if (negative) out << '-';
    } else {
      out << (negative ? " - " : " + ");
    }
    first = false;
    const Rational magnitude = abs(coef);
    bool wrote = false;
    if (magnitude != 1 || mono.is_one()) {
      out << rational_to_string(magnitude);
      wrote = true;
    }
    for (std::size_t i = 0; i < kVarCount; ++i) {
      const auto v = static_cast<Var>(i);
      const Exponent& e = mono[v];
      if (e == 0) continue;
      if (wrote) out << " * ";
      out << var_name(v);
      if (e != 1) out << '^' << exponent_to_string(e);
      wrote = true;
    }
  }
  return out.str();
}

// ---------------------------------------------------------------- parsing

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  GenPoly parse() {
    skip_ws();
    if (at_end()) throw ParseError("empty polynomial text");
    GenPoly result;
    bool negate = false;
    if (peek() == '+' || peek() == '-') {
      negate = peek() == '-';
      ++pos_;
    }
    for (;;) {
      GenPoly t = parse_term();
      result += negate ? -t : t;
      skip_ws();
      if (at_end()) break;
      const char op = peek();
      if (op != '+' && op != '-') fail("expected '+' or '-'");
      negate = op == '-';
      ++pos_;
    }
    return result;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("polynomial parse error at offset " + std::to_string(pos_) + ": " + what +
                     " in \"" + std::string(text_) + "\"");
  }

  std::string read_digits() {
    skip_ws();
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) fail("expected digits");
    return std::string(text_.substr(start, pos_ - start));
  }

  Exponent read_exponent() {
    skip_ws();
    bool paren = false;
    if (!at_end() && peek() == '(') {
      paren = true;
      ++pos_;
      skip_ws();
    }
    bool neg = false;
    if (!at_end() && peek() == '-') {
      neg = true;
      ++pos_;
    }
    const std::int64_t num = std::stoll(read_digits());
    std::int64_t den = 1;
    skip_ws();
    if (!at_end() && peek() == '/') {
      ++pos_;
      den = std::stoll(read_digits());
      if (den == 0) fail("zero exponent denominator");
    }
    if (paren) {
      skip_ws();
      if (at_end() || peek() != ')') fail("expected ')'");
      ++pos_;
    }
    return Exponent(neg ? -num : num, den);
  }

  GenPoly parse_factor() {
    skip_ws();
    if (at_end()) fail("unexpected end of input");
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      Rational value(read_digits());
      skip_ws();
      if (!at_end() && peek() == '/') {
        ++pos_;
        Rational den(read_digits());
        if (den == 0) fail("zero denominator");
        value /= den;
      }
      return GenPoly(value);
    }
    if (std::isalpha(static_cast<unsigned char>(peek()))) {
      const std::size_t start = pos_;
      while (!at_end() && std::isalnum(static_cast<unsigned char>(peek()))) ++pos_;
      const auto name = text_.substr(start, pos_ - start);
      const auto var = var_from_name(name);
      if (!var) fail("unknown variable '" + std::string(name) + "'");
      skip_ws();
      Exponent e(1);
      if (!at_end() && peek() == '^') {
        ++pos_;
        e = read_exponent();
      }
      try {
        return GenPoly::variable(*var, e);
      } catch (const DomainError& err) {
        fail(err.what());
      }
    }
    fail(std::string("unexpected character '") + peek() + "'");
  }

  GenPoly parse_term() {
    GenPoly t = parse_factor();
    for (;;) {
      skip_ws();
      if (at_end() || peek() != '*') return t;
      ++pos_;
      t *= parse_factor();
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

GenPoly GenPoly::parse(std::string_view text) { return Parser(text).parse(); }

Exponent parse_exponent(std::string_view text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string_view::npos) return Exponent(std::stoll(std::string(text)));
    const auto num = std::stoll(std::string(text.substr(0, slash)));
    const auto den = std::stoll(std::string(text.substr(slash + 1)));
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    return Exponent(num, den);
  } catch (const std::logic_error&) {
    throw ParseError("malformed rational '" + std::string(text) + "'");
  }
}

// ---------------------------------------------------------------- calculus

GenPoly differentiate(const GenPoly& p, Var var) {
  GenPoly out;
  for (const auto& [mono, coef] : p.terms()) {
    const Exponent e = mono[var];
    if (e == 0) continue;
    Monomial m = mono;
    m[var] = e - 1;
    out += GenPoly::term(coef * Rational(e.numerator(), e.denominator()), m);
  }
  return out;
}

Degree degree_in(const GenPoly& p, Var var) {
  Degree best = Degree::neg_infinity();
  for (const auto& [mono, coef] : p.terms()) {
    const Degree d(mono[var]);
    if (best < d) best = d;
  }
  return best;
}

GenPoly coefficient_of(const GenPoly& p, Var var, Exponent e) {
  GenPoly out;
  for (const auto& [mono, coef] : p.terms()) {
    if (mono[var] != e) continue;
    Monomial m = mono;
    m[var] = 0;
    out += GenPoly::term(coef, m);
  }
  return out;
}

namespace {

// binding^e for a possibly non-integer exponent e.
GenPoly power_of_binding(const GenPoly& binding, const Exponent& e, Var var) {
  if (is_integer(e) && e >= 0) return binding.pow(static_cast<unsigned>(e.numerator()));
  if (!binding.is_monomial() || binding.terms().begin()->second != 1) {
    throw DomainError("substitute: exponent " + exponent_to_string(e) + " of " +
                      std::string(var_name(var)) +
                      " requires a unit-coefficient monomial binding, got " +
                      binding.to_string());
  }
  const Monomial& base = binding.terms().begin()->first;
  Monomial m;
  for (std::size_t i = 0; i < kVarCount; ++i) {
    const auto v = static_cast<Var>(i);
    m[v] = base[v] * e;
  }
  return GenPoly::term(Rational(1), m);
}

}  // namespace

GenPoly substitute(const GenPoly& p, const Bindings& bindings) {
  GenPoly out;
  for (const auto& [mono, coef] : p.terms()) {
    GenPoly product(coef);
    Monomial kept;
    for (std::size_t i = 0; i < kVarCount; ++i) {
      const auto v = static_cast<Var>(i);
      const Exponent& e = mono[v];
      if (e == 0) continue;
      auto it = bindings.find(v);
      if (it == bindings.end()) {
        kept[v] = e;
      } else {
        product *= power_of_binding(it->second, e, v);
      }
    }
    out += product * GenPoly::term(Rational(1), kept);
  }
  return out;
}

GenPoly evaluate_exact(const GenPoly& p, const std::map<Var, Rational>& point) {
  GenPoly out;
  for (const auto& [mono, coef] : p.terms()) {
    Rational value = coef;
    Monomial kept;
    for (std::size_t i = 0; i < kVarCount; ++i) {
      const auto v = static_cast<Var>(i);
      const Exponent& e = mono[v];
      if (e == 0) continue;
      auto it = point.find(v);
      if (it == point.end()) {
        kept[v] = e;
        continue;
      }
      if (!is_integer(e) || e < 0) {
        throw DomainError("evaluate_exact: non-integer exponent of " +
                          std::string(var_name(v)));
      }
      Rational power(1);
      for (std::int64_t k = 0; k < e.numerator(); ++k) power *= it->second;
      value *= power;
    }
    out += GenPoly::term(value, kept);
  }
  return out;
}

TLimit limit_t_to_infinity(const GenPoly& p) {
  const Degree d = degree_in(p, Var::t);
  if (d > Degree(Exponent(0))) {
    throw DomainError("limit_t_to_infinity: t-degree " + d.to_string() +
                      " is positive, limit diverges");
  }
  TLimit out;
  for (const auto& [mono, coef] : p.terms()) {
    if (mono[Var::t] == 0) {
      out.limit += GenPoly::term(coef, mono);
    } else {
      out.remainder += GenPoly::term(coef, mono);
    }
  }
  return out;
}

GenPoly rename(const GenPoly& p, Var from, Var to) {
  GenPoly out;
  for (const auto& [mono, coef] : p.terms()) {
    Monomial m = mono;
    std::swap(m[from], m[to]);
    out += GenPoly::term(coef, m);
  }
  return out;
}

namespace numeric {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace numeric

}  // namespace flowlab
