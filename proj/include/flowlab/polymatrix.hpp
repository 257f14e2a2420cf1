#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "flowlab/genpoly.hpp"
#include "flowlab/matrix.hpp"

namespace flowlab {

/// Square matrix of generalized polynomials.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  explicit PolyMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {}
  PolyMatrix(std::size_t dim, std::vector<GenPoly> entries);
  PolyMatrix(std::initializer_list<std::initializer_list<GenPoly>> rows);

  static PolyMatrix identity(std::size_t dim);
  /// Parses `[[e11, e12], [e21, e22]]` with entries in GenPoly text form.
  static PolyMatrix parse(std::string_view text);

  std::size_t dim() const { return dim_; }
  const GenPoly& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }
  GenPoly& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
  const std::vector<GenPoly>& entries() const { return entries_; }

  bool is_zero() const;
  bool is_identity() const;
  bool depends_on(Var v) const;

  PolyMatrix operator-() const;
  friend PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b);
  friend PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b);
  friend PolyMatrix operator*(const GenPoly& c, const PolyMatrix& m);
  friend bool operator==(const PolyMatrix& a, const PolyMatrix& b) = default;

  std::string to_string() const;

 private:
  std::size_t dim_ = 0;
  std::vector<GenPoly> entries_;
};

/// Exact product. Throws DimensionError on mismatched sides.
PolyMatrix multiply(const PolyMatrix& a, const PolyMatrix& b);
inline PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) { return multiply(a, b); }

PolyMatrix differentiate(const PolyMatrix& m, Var var);
/// Maximum entry degree; negative infinity for the zero matrix.
Degree degree_in(const PolyMatrix& m, Var var);
PolyMatrix substitute(const PolyMatrix& m, const Bindings& bindings);
PolyMatrix evaluate_exact(const PolyMatrix& m, const std::map<Var, Rational>& point);
PolyMatrix rename(const PolyMatrix& m, Var from, Var to);

struct MatrixTLimit {
  PolyMatrix limit;
  PolyMatrix remainder;
};
MatrixTLimit limit_t_to_infinity(const PolyMatrix& m);

/// Cofactor expansion.
GenPoly determinant(const PolyMatrix& m);

/// Inverse of a matrix whose determinant is identically 1, via the adjugate.
/// Throws DomainError quoting the symbolic determinant otherwise.
PolyMatrix matrix_inverse_sl(const PolyMatrix& m);

template <class Real>
Matrix<Real> evaluate(const PolyMatrix& m, const Point<Real>& point) {
  Matrix<Real> out(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) out(i, j) = evaluate(m(i, j), point);
  }
  return out;
}

}  // namespace flowlab
