#pragma once

// Flattened evaluators for polynomials with nonnegative integer exponents in
// a fixed list of input variables. These sit on the hot paths of the grid
// kernels, where walking the GenPoly term map per sample is too slow.

#include <cstdint>
#include <span>
#include <vector>

#include "flowlab/genpoly.hpp"
#include "flowlab/polymatrix.hpp"

namespace flowlab {

template <class Real>
class CompiledPoly {
 public:
  CompiledPoly() = default;

  /// `inputs[i]` is bound to `args[i]` at evaluation time. Throws DomainError
  /// if `p` mentions any other variable or a non-integer exponent.
  CompiledPoly(const GenPoly& p, std::span<const Var> inputs) : arity_(inputs.size()) {
    for (const auto& [mono, coef] : p.terms()) {
      Term term;
      term.coef = numeric::from_rational<Real>(coef);
      term.powers.assign(arity_, 0);
      for (std::size_t v = 0; v < kVarCount; ++v) {
        const Exponent& e = mono[static_cast<Var>(v)];
        if (e == 0) continue;
        std::size_t slot = arity_;
        for (std::size_t i = 0; i < arity_; ++i) {
          if (static_cast<std::size_t>(inputs[i]) == v) slot = i;
        }
        if (slot == arity_) {
          throw DomainError("CompiledPoly: variable " +
                            std::string(var_name(static_cast<Var>(v))) + " is not an input");
        }
        if (e.denominator() != 1 || e < 0) {
          throw DomainError("CompiledPoly: exponents must be nonnegative integers");
        }
        term.powers[slot] = static_cast<std::uint16_t>(e.numerator());
        if (term.powers[slot] > max_power_) max_power_ = term.powers[slot];
      }
      terms_.push_back(std::move(term));
    }
  }

  std::size_t arity() const { return arity_; }

  Real operator()(std::span<const Real> args) const {
    // Power tables for each input, shared by all terms.
    Real table[4][16];
    const std::size_t width = static_cast<std::size_t>(max_power_) + 1;
    const bool small = arity_ <= 4 && width <= 16;
    if (small) {
      for (std::size_t i = 0; i < arity_; ++i) {
        table[i][0] = Real(1);
        for (std::size_t k = 1; k < width; ++k) table[i][k] = table[i][k - 1] * args[i];
      }
    }
    Real sum(0);
    for (const auto& term : terms_) {
      Real value = term.coef;
      for (std::size_t i = 0; i < arity_; ++i) {
        if (term.powers[i] == 0) continue;
        value *= small ? table[i][term.powers[i]] : numeric::int_pow(args[i], term.powers[i]);
      }
      sum += value;
    }
    return sum;
  }

 private:
  struct Term {
    Real coef;
    std::vector<std::uint16_t> powers;
  };
  std::size_t arity_ = 0;
  std::uint16_t max_power_ = 0;
  std::vector<Term> terms_;
};

template <class Real>
class CompiledMatrix {
 public:
  CompiledMatrix() = default;
  CompiledMatrix(const PolyMatrix& m, std::span<const Var> inputs)
      : dim_(m.dim()), inputs_(inputs.begin(), inputs.end()) {
    entries_.reserve(dim_ * dim_);
    for (const auto& e : m.entries()) entries_.emplace_back(e, inputs);
  }

  std::size_t dim() const { return dim_; }
  std::size_t arity() const { return inputs_.size(); }
  const std::vector<Var>& inputs() const { return inputs_; }

  Matrix<Real> operator()(std::span<const Real> args) const {
    Matrix<Real> out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j < dim_; ++j) out(i, j) = entries_[i * dim_ + j](args);
    }
    return out;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<Var> inputs_;
  std::vector<CompiledPoly<Real>> entries_;
};

}  // namespace flowlab
