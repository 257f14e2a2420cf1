#pragma once

// Points of SL(N,R)/SL(N,Z), N in {2, 3}, as unimodular lattices g Z^N:
// reduction, shortest vectors, Siegel transforms of radial test functions,
// Haar references and Haar sampling on the modular surface.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowlab/matrix.hpp"
#include "flowlab/numeric.hpp"

namespace flowlab {

/// Lattice generated by the columns of g. Reduction runs in binary128 so that
/// bases with entries near 1e12 still reduce to vectors of length ~1 accurately.
class UnimodularLattice {
 public:
  UnimodularLattice() = default;

  const Matrix<wide_real>& basis() const { return basis_; }
  /// Reduced basis, columns sorted by length.
  const Matrix<double>& reduced() const { return reduced_; }
  /// lambda_1, certified by enumeration.
  double shortest() const { return shortest_; }
  std::size_t dim() const { return basis_.dim(); }

 private:
  friend UnimodularLattice reduce_basis(const Matrix<wide_real>& g);
  Matrix<wide_real> basis_;
  Matrix<double> reduced_;
  double shortest_ = 0.0;
};

/// Throws DomainError if |det g - 1| > 1e-9, DimensionError unless N in {2,3}.
UnimodularLattice reduce_basis(const Matrix<wide_real>& g);
UnimodularLattice reduce_basis(const Matrix<double>& g);

double shortest_vector_length(const UnimodularLattice& lattice);

enum class TestKind { indicator_ball, smooth_bump };

struct TestFunction {
  TestKind kind = TestKind::indicator_ball;
  double radius = 1.0;

  /// Radial profile; the ball is closed up to a relative 1e-12 so that lattice
  /// points exactly on the sphere are counted despite rounding.
  double operator()(double r) const;
  /// `siegel:indicator:R` or `siegel:bump:R`. Throws ParseError.
  static TestFunction parse(std::string_view text);
  std::string name() const;
};

/// Guard on lambda_1 below which enumeration is refused.
inline constexpr double kCuspGuard = 1e-6;

/// Sum of f(g v) over nonzero integer v with ||g v|| <= R. Throws CuspError
/// when lambda_1 < kCuspGuard.
double siegel_transform(const UnimodularLattice& lattice, const TestFunction& f);

/// Several observables from one enumeration at the largest radius.
void siegel_transform_many(const UnimodularLattice& lattice, std::span<const TestFunction> fs,
                           std::span<double> out);

/// Number of nonzero lattice vectors of length <= R, and the same by brute
/// force over coefficients in [-bound, bound]^N (test oracle).
std::size_t count_lattice_points(const UnimodularLattice& lattice, double radius);
std::size_t brute_force_count(const Matrix<double>& g, double radius, int bound);

/// Integral of f over R^N; closed form for the indicator, 1-d quadrature for the bump.
double haar_expectation(const TestFunction& f, std::size_t n);

/// Haar-distributed lattices in SL(2,R)/SL(2,Z). Sample i depends only on (seed, i).
std::vector<UnimodularLattice> haar_sample(std::size_t n, std::uint64_t seed);
Matrix<double> haar_sample_matrix(std::uint64_t seed, std::uint64_t index);

bool in_compact(const UnimodularLattice& lattice, double eps0);

}  // namespace flowlab
