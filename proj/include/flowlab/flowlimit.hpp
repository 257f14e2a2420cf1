#pragma once

// Limiting unipotent flows of rescaled polynomial trajectories.
//
// For Theta: R^k -> SL_N with Theta(0) = Id and box exponents lambda, the
// rescaled map theta(alpha, t) = Theta(alpha_1 t^lambda_1, ..., alpha_k t^lambda_k)
// satisfies theta(alpha, t + s t^-q) theta(alpha, t)^-1 -> rho_alpha(s) as t -> oo,
// where rho_alpha(s) = Id + sum_{l<=d} M_l(alpha) s^l / l!. This header extracts
// q, d and the M_l exactly, plus the two-variable analogue along x with y fixed.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flowlab/genpoly.hpp"
#include "flowlab/matrix.hpp"
#include "flowlab/polymatrix.hpp"

namespace flowlab {

struct NormalizedExponents {
  Exponent scale;               ///< c > 0
  std::vector<Exponent> lambda; ///< c * lambda_i, each > 1, at least one non-integer
};

/// Smallest c on the quarter-integer grid 1, 5/4, 3/2, ... with every c*lambda_i > 1
/// and some c*lambda_i non-integer. Throws PreconditionError unless all lambda_i > 0.
NormalizedExponents normalize_exponents(std::span<const Exponent> lambda);

/// Substitutes x_i -> alpha_i t^lambda_i (x, y, z are the map coordinates).
/// Throws PreconditionError when Theta(0) != Id or Theta already involves t.
PolyMatrix rescale(const PolyMatrix& theta_map, std::span<const Exponent> lambda);

struct FlowStage {
  int d;
  Exponent q;
};

struct FlowResult {
  Exponent q;                        ///< critical exponent
  int d = 0;                         ///< Taylor order
  std::vector<PolyMatrix> limits;    ///< M_1 .. M_d, polynomials in alpha only
  PolyMatrix generator;              ///< Y_alpha = M_1(alpha)
  std::vector<GenPoly> degenerate_locus;  ///< all nonzero entries of all M_l
  std::vector<FlowStage> stages;     ///< (d_i, q_i) in iteration order
  std::size_t box_dim = 0;           ///< number of alpha variables
};

/// Runs the d_i / q_i iteration on a rescaled map theta(alpha, t).
/// Throws PreconditionError if theta is constant in t or has only integer
/// t-exponents, and InvariantError if a limit diverges.
FlowResult compute_flow(const PolyMatrix& theta);

/// rho_alpha(s) = Id + sum M_l s^l / l! as a matrix in (alpha, s).
PolyMatrix flow_of(const FlowResult& result, Var s = Var::s);

/// True when some degenerate-locus polynomial is nonzero at alpha, i.e. alpha
/// lies outside every X_i.
bool outside_degenerate_locus(const FlowResult& result, std::span<const Rational> alpha);

/// exp(sY) for nilpotent Y as the finite sum over j < N.
/// Throws DomainError unless the N-th power of Y has max entry below 1e-9.
Matrix<double> nilpotent_exp(const Matrix<double>& y, double s);

struct GroupLawReport {
  bool symbolic_group_law = false;   ///< rho(s1+s2) == rho(s1) rho(s2) exactly
  bool generator_is_m1 = false;      ///< Y == M_1 exactly
  bool generator_nilpotent = false;  ///< Y^N == 0 exactly
  bool exp_agreement = false;        ///< nilpotent_exp(Y(a), s) == rho_a(s) within 1e-9
  double max_exp_deviation = 0.0;
  std::size_t trials = 0;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

GroupLawReport group_law_check(const FlowResult& result, std::size_t trials,
                               std::uint64_t seed = 1);

/// Max-entry deviation between theta(alpha, t + s t^-q) theta(alpha, t)^-1 and
/// rho_alpha(s), computed in 100-digit arithmetic. Requires t > 0.
double limit_residual(const PolyMatrix& theta, const FlowResult& result,
                      std::span<const double> alpha, double s, double t);

struct PreparedFlow {
  NormalizedExponents normalization;
  PolyMatrix theta;  ///< rescaled map
  FlowResult flow;
};

/// normalize_exponents + rescale + compute_flow. If the rescaled map has only
/// integer t-exponents, the scale search continues along the same grid.
PreparedFlow prepare_flow(const PolyMatrix& theta_map, std::span<const Exponent> lambda);

// ------------------------------------------------------------ two variables

struct TwoDimFlowResult {
  Exponent q;                        ///< critical exponent in x
  int d0 = 0;                        ///< x-degree of Theta
  std::vector<PolyMatrix> lambda_l;  ///< lambda_1(y) .. lambda_d0(y)
  PolyMatrix lambda_of_y;            ///< lambda(y) = lambda_1(y), nilpotent
  int d = 0;                         ///< y-degree of lambda(y)
  PolyMatrix lambda0;                ///< leading y-coefficient of lambda(y)
  PolyMatrix rho;                    ///< exp(s lambda0) in the variable s
  int p = 0;                         ///< y-degree of Theta_x Theta^-1
  Exponent b;                        ///< p + 1
  std::vector<std::pair<Exponent, Exponent>> ratio_set;  ///< (t, r): y^t / x^r, r != 0
  std::optional<std::pair<Exponent, Exponent>> dominant_ratio;
};

/// Throws PreconditionError when deg_x(Theta) = 0, Theta(0,0) != Id, or det != 1.
TwoDimFlowResult twodim_flow(const PolyMatrix& theta_map);

/// Max-entry deviation between rho(s) Theta(x, y) and Theta(x + s y^-d x^-q, y),
/// in 100-digit arithmetic. Requires x, y > 0.
double twodim_residual(const PolyMatrix& theta_map, const TwoDimFlowResult& result, double s,
                       double x, double y);

/// Max-entry deviation between Theta(x + s y^-d x^-q, y) Theta(x, y)^-1 and
/// rho(s): the displacement on the homogeneous space, insensitive to the size
/// of Theta(x, y) itself. Requires x, y > 0.
double twodim_flow_defect(const PolyMatrix& theta_map, const TwoDimFlowResult& result, double s,
                          double x, double y);

/// exp(s N) for an exactly nilpotent constant matrix, as a matrix in `s`.
PolyMatrix symbolic_nilpotent_exp(const PolyMatrix& nilpotent, Var s = Var::s);

/// Structured text rendering used by the CLI.
std::string describe(const FlowResult& result);
std::string describe(const TwoDimFlowResult& result);

}  // namespace flowlab
