#pragma once

// Scalar plumbing shared by the symbolic and numerical layers: conversions
// from exact rationals and powers for the floating types used here.

#include <cmath>
#include <cstdint>
#include <string>

#include <boost/multiprecision/mpfr.hpp>
#include <gmpxx.h>
#include <quadmath.h>

namespace flowlab {

/// Working type for lattice evaluation: IEEE binary128.
using wide_real = __float128;

/// Working type for asymptotic residuals, where entries reach t^10 and the
/// quantity of interest is 1e-10.
using high_real = boost::multiprecision::mpfr_float_100;

namespace numeric {

template <class Real>
Real from_rational(const mpq_class& q);

template <>
inline double from_rational<double>(const mpq_class& q) {
  return q.get_d();
}

template <>
inline long double from_rational<long double>(const mpq_class& q) {
  if (q.get_num().fits_slong_p() && q.get_den().fits_slong_p()) {
    return static_cast<long double>(q.get_num().get_si()) /
           static_cast<long double>(q.get_den().get_si());
  }
  return static_cast<long double>(q.get_d());
}

template <>
inline wide_real from_rational<wide_real>(const mpq_class& q) {
  if (q.get_num().fits_slong_p() && q.get_den().fits_slong_p()) {
    return static_cast<wide_real>(q.get_num().get_si()) /
           static_cast<wide_real>(q.get_den().get_si());
  }
  return strtoflt128(q.get_num().get_str().c_str(), nullptr) /
         strtoflt128(q.get_den().get_str().c_str(), nullptr);
}

template <>
inline high_real from_rational<high_real>(const mpq_class& q) {
  return high_real(q.get_mpq_t());
}

template <class Real>
Real int_pow(Real base, unsigned n) {
  Real result(1);
  while (n > 0) {
    if (n & 1U) result *= base;
    base *= base;
    n >>= 1U;
  }
  return result;
}

inline double rational_pow(double base, std::int64_t num, std::int64_t den) {
  return std::pow(base, static_cast<double>(num) / static_cast<double>(den));
}

inline long double rational_pow(long double base, std::int64_t num, std::int64_t den) {
  return std::pow(base, static_cast<long double>(num) / static_cast<long double>(den));
}

inline wide_real rational_pow(wide_real base, std::int64_t num, std::int64_t den) {
  return powq(base, static_cast<wide_real>(num) / static_cast<wide_real>(den));
}

inline high_real rational_pow(const high_real& base, std::int64_t num, std::int64_t den) {
  return boost::multiprecision::pow(base, high_real(num) / high_real(den));
}

inline double to_double(double v) { return v; }
inline double to_double(long double v) { return static_cast<double>(v); }
inline double to_double(wide_real v) { return static_cast<double>(v); }
inline double to_double(const high_real& v) { return v.convert_to<double>(); }

inline wide_real abs(wide_real v) { return fabsq(v); }
inline wide_real sqrt(wide_real v) { return sqrtq(v); }
inline wide_real round(wide_real v) { return roundq(v); }

/// Shortest decimal text that reads back to the same double (17 significant digits).
std::string format_double(double v);

}  // namespace numeric
}  // namespace flowlab
