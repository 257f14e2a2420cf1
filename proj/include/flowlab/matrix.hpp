#pragma once

// Small dense square matrices over a floating type. Sizes here are 2 or 3, so
// storage is a flat vector and products are the naive triple loop.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "flowlab/error.hpp"

namespace flowlab {

template <class Real>
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t dim) : dim_(dim), data_(dim * dim, Real(0)) {}
  Matrix(std::initializer_list<std::initializer_list<Real>> rows) : dim_(rows.size()) {
    data_.reserve(dim_ * dim_);
    for (const auto& row : rows) {
      if (row.size() != dim_) throw DimensionError("Matrix: ragged initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t dim) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = Real(1);
    return m;
  }

  std::size_t dim() const { return dim_; }
  Real& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  const Real& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.dim_ != b.dim_) throw DimensionError("Matrix product: dimension mismatch");
    Matrix out(a.dim_);
    for (std::size_t i = 0; i < a.dim_; ++i) {
      for (std::size_t k = 0; k < a.dim_; ++k) {
        const Real aik = a(i, k);
        for (std::size_t j = 0; j < a.dim_; ++j) out(i, j) += aik * b(k, j);
      }
    }
    return out;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) {
    if (a.dim_ != b.dim_) throw DimensionError("Matrix sum: dimension mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }

  friend Matrix operator-(Matrix a, const Matrix& b) {
    if (a.dim_ != b.dim_) throw DimensionError("Matrix difference: dimension mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }

  friend Matrix operator*(const Real& c, Matrix m) {
    for (auto& v : m.data_) v *= c;
    return m;
  }

  const std::vector<Real>& data() const { return data_; }

 private:
  std::size_t dim_ = 0;
  std::vector<Real> data_;
};

template <class Real>
Real max_abs_entry(const Matrix<Real>& m) {
  using std::abs;
  Real best(0);
  for (const auto& v : m.data()) {
    const Real a = abs(v);
    if (a > best) best = a;
  }
  return best;
}

/// Determinant of a 2x2 or 3x3 matrix.
template <class Real>
Real determinant(const Matrix<Real>& m) {
  if (m.dim() == 1) return m(0, 0);
  if (m.dim() == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (m.dim() == 3) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  }
  throw DimensionError("determinant: only N <= 3 supported");
}

/// Inverse of a unimodular 2x2 or 3x3 matrix via the adjugate.
template <class Real>
Matrix<Real> inverse_unimodular(const Matrix<Real>& m) {
  Matrix<Real> inv(m.dim());
  if (m.dim() == 2) {
    inv(0, 0) = m(1, 1);
    inv(0, 1) = -m(0, 1);
    inv(1, 0) = -m(1, 0);
    inv(1, 1) = m(0, 0);
    return inv;
  }
  if (m.dim() == 3) {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        const std::size_t r0 = (j + 1) % 3, r1 = (j + 2) % 3;
        const std::size_t c0 = (i + 1) % 3, c1 = (i + 2) % 3;
        inv(i, j) = m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
      }
    }
    return inv;
  }
  throw DimensionError("inverse_unimodular: only N <= 3 supported");
}

}  // namespace flowlab
