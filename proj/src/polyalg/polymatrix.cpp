#include "flowlab/polymatrix.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace flowlab {

PolyMatrix::PolyMatrix(std::size_t dim, std::vector<GenPoly> entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (entries_.size() != dim_ * dim_) throw DimensionError("PolyMatrix: entry count mismatch");
}

PolyMatrix::PolyMatrix(std::initializer_list<std::initializer_list<GenPoly>> rows)
    : dim_(rows.size()) {
  entries_.reserve(dim_ * dim_);
  for (const auto& row : rows) {
    if (row.size() != dim_) throw DimensionError("PolyMatrix: ragged initializer");
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
}

PolyMatrix PolyMatrix::identity(std::size_t dim) {
  PolyMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = GenPoly(1);
  return m;
}

PolyMatrix PolyMatrix::parse(std::string_view text) {
  std::vector<std::vector<GenPoly>> rows;
  int depth = 0;
  std::string cell;
  auto flush = [&] {
    rows.back().push_back(GenPoly::parse(cell));
    cell.clear();
  };
  for (char ch : text) {
    if (ch == '[') {
      ++depth;
      if (depth == 2) rows.emplace_back();
      if (depth > 2) throw ParseError("matrix text nested too deeply");
    } else if (ch == ']') {
      if (depth == 2) flush();
      --depth;
      if (depth < 0) throw ParseError("unbalanced ']' in matrix text");
    } else if (ch == ',' && depth == 2) {
      flush();
    } else if (depth == 2) {
      cell.push_back(ch);
    } else if (!std::isspace(static_cast<unsigned char>(ch)) && ch != ',') {
      throw ParseError(std::string("unexpected '") + ch + "' in matrix text");
    }
  }
  if (depth != 0 || rows.empty()) throw ParseError("malformed matrix text");
  const std::size_t n = rows.size();
  std::vector<GenPoly> entries;
  for (auto& row : rows) {
    if (row.size() != n) throw ParseError("matrix text is not square");
    for (auto& e : row) entries.push_back(std::move(e));
  }
  return PolyMatrix(n, std::move(entries));
}

bool PolyMatrix::is_zero() const {
  for (const auto& e : entries_) {
    if (!e.is_zero()) return false;
  }
  return true;
}

bool PolyMatrix::is_identity() const { return *this == identity(dim_); }

bool PolyMatrix::depends_on(Var v) const {
  for (const auto& e : entries_) {
    if (e.depends_on(v)) return true;
  }
  return false;
}

PolyMatrix PolyMatrix::operator-() const {
  PolyMatrix out = *this;
  for (auto& e : out.entries_) e = -e;
  return out;
}

PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.dim_ != b.dim_) throw DimensionError("PolyMatrix sum: dimension mismatch");
  PolyMatrix out = a;
  for (std::size_t i = 0; i < out.entries_.size(); ++i) out.entries_[i] += b.entries_[i];
  return out;
}

PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.dim_ != b.dim_) throw DimensionError("PolyMatrix difference: dimension mismatch");
  PolyMatrix out = a;
  for (std::size_t i = 0; i < out.entries_.size(); ++i) out.entries_[i] -= b.entries_[i];
  return out;
}

PolyMatrix operator*(const GenPoly& c, const PolyMatrix& m) {
  PolyMatrix out = m;
  for (auto& e : out.entries_) e = c * e;
  return out;
}

std::string PolyMatrix::to_string() const {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < dim_; ++i) {
    if (i) out << ", ";
    out << '[';
    for (std::size_t j = 0; j < dim_; ++j) {
      if (j) out << ", ";
      out << (*this)(i, j).to_string();
    }
    out << ']';
  }
  out << ']';
  return out.str();
}

PolyMatrix multiply(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("multiply: " + std::to_string(a.dim()) + "x" + std::to_string(a.dim()) +
                         " times " + std::to_string(b.dim()) + "x" + std::to_string(b.dim()));
  }
  const std::size_t n = a.dim();
  PolyMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      GenPoly sum;
      for (std::size_t k = 0; k < n; ++k) {
        if (a(i, k).is_zero() || b(k, j).is_zero()) continue;
        sum += a(i, k) * b(k, j);
      }
      out(i, j) = std::move(sum);
    }
  }
  return out;
}

namespace {

template <class F>
PolyMatrix map_entries(const PolyMatrix& m, F&& f) {
  std::vector<GenPoly> entries;
  entries.reserve(m.entries().size());
  for (const auto& e : m.entries()) entries.push_back(f(e));
  return PolyMatrix(m.dim(), std::move(entries));
}

}  // namespace

PolyMatrix differentiate(const PolyMatrix& m, Var var) {
  return map_entries(m, [&](const GenPoly& e) { return differentiate(e, var); });
}

Degree degree_in(const PolyMatrix& m, Var var) {
  Degree best = Degree::neg_infinity();
  for (const auto& e : m.entries()) {
    const Degree d = degree_in(e, var);
    if (best < d) best = d;
  }
  return best;
}

PolyMatrix substitute(const PolyMatrix& m, const Bindings& bindings) {
  return map_entries(m, [&](const GenPoly& e) { return substitute(e, bindings); });
}

PolyMatrix evaluate_exact(const PolyMatrix& m, const std::map<Var, Rational>& point) {
  return map_entries(m, [&](const GenPoly& e) { return evaluate_exact(e, point); });
}

PolyMatrix rename(const PolyMatrix& m, Var from, Var to) {
  return map_entries(m, [&](const GenPoly& e) { return rename(e, from, to); });
}

MatrixTLimit limit_t_to_infinity(const PolyMatrix& m) {
  MatrixTLimit out{PolyMatrix(m.dim()), PolyMatrix(m.dim())};
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) {
      auto lim = limit_t_to_infinity(m(i, j));
      out.limit(i, j) = std::move(lim.limit);
      out.remainder(i, j) = std::move(lim.remainder);
    }
  }
  return out;
}

namespace {

PolyMatrix minor_matrix(const PolyMatrix& m, std::size_t row, std::size_t col) {
  const std::size_t n = m.dim();
  PolyMatrix out(n - 1);
  for (std::size_t i = 0, oi = 0; i < n; ++i) {
    if (i == row) continue;
    for (std::size_t j = 0, oj = 0; j < n; ++j) {
      if (j == col) continue;
      out(oi, oj++) = m(i, j);
    }
    ++oi;
  }
  return out;
}

}  // namespace

GenPoly determinant(const PolyMatrix& m) {
  const std::size_t n = m.dim();
  if (n == 0) return GenPoly(1);
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  GenPoly det;
  for (std::size_t j = 0; j < n; ++j) {
    if (m(0, j).is_zero()) continue;
    GenPoly term = m(0, j) * determinant(minor_matrix(m, 0, j));
    if (j % 2 == 0) {
      det += term;
    } else {
      det -= term;
    }
  }
  return det;
}

PolyMatrix matrix_inverse_sl(const PolyMatrix& m) {
  const GenPoly det = determinant(m);
  if (det != GenPoly(1)) {
    throw DomainError("matrix_inverse_sl: determinant is " + det.to_string() + ", not 1");
  }
  const std::size_t n = m.dim();
  if (n == 1) return PolyMatrix::identity(1);
  PolyMatrix inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      GenPoly cof = determinant(minor_matrix(m, j, i));
      inv(i, j) = (i + j) % 2 == 0 ? cof : -cof;
    }
  }
  return inv;
}

}  // namespace flowlab
