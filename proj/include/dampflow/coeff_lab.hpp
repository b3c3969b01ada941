#ifndef DAMPFLOW_COEFF_LAB_HPP
#define DAMPFLOW_COEFF_LAB_HPP

#include <optional>
#include <span>
#include <string>

#include "dampflow/gas_model.hpp"

namespace dampflow {

struct unsupported_regime : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Regime { gamma_below_3, gamma_above_3, gamma_eq_3 };
Regime regime_of(const GasParams& g);

// The integrating-factor exponent of the gradient variables. The correct
// antiderivative carries (1+t)^{1-lambda}; the minus_lambda variant exists
// solely so the residual probe can demonstrate that it is wrong.
enum class ExponentConvention { one_minus_lambda, minus_lambda };

// Time-dependent Riccati coefficients: y' = a0 - a2 y^2 for gamma != 3,
// y1' = -a2 y1^2 - a1 y1 + a0 for gamma = 3 (a1 == 0 otherwise).
struct CoefficientSet {
  GasParams params;
  Regime regime;
  ExponentConvention convention = ExponentConvention::one_minus_lambda;

  double a0(double t, double phi) const;
  double a1(double t, double phi) const;
  double a2(double t, double phi) const;

  // exp(alpha(3 gamma - 1)/(2(gamma-3)(1-lambda)) * (1+t)^{1-lambda});
  // the weight carried by y and q (gamma != 3 only).
  double integrating_exponential(double t) const;
};

CoefficientSet riccati_coefficients(
    const GasParams& g,
    ExponentConvention convention = ExponentConvention::one_minus_lambda);

// Gradient variables rebuilt from field data along a characteristic.
// grad is w_x for the forward family, z_x for the backward one.
double gradient_variable(double t, double phi, double grad, const GasParams& g,
                         ExponentConvention convention = ExponentConvention::one_minus_lambda);

// Root of (1+t0)^{lambda-1} = alpha(gamma-1)/(lambda(gamma-3)), when positive.
std::optional<double> sign_change_time(const GasParams& g);

// ---- control functions -------------------------------------------------

// h(tau) = 4(K gamma)^{1/4}/(3-gamma) tau^{(3-gamma)/4}   (gamma != 3)
double control_h(double tau, const GasParams& g);
// h1(tau) = (3K)^{1/4} ln(C~0 tau)                        (gamma = 3)
double control_h1(double tau, const GasParams& g);
// control functions G/H: c^{1/2} grad + alpha (1+t)^{-lambda} h(tau).
double control_G(double t, double tau, double grad, const GasParams& g);
// over-damping variant: coefficient alpha - lambda.
double control_G_hat(double t, double tau, double grad, const GasParams& g);
// integrating factors A(t) and A1(t)
double factor_A(double t, const GasParams& g);
double factor_A1(double t, const GasParams& g);

// ---- bounds machinery --------------------------------------------------

// Ceiling for the initial control functions over the grid, 1.01x the sup,
// floored at 1e-12 so degenerate data keeps downstream divisions defined.
double ceiling_M(std::span<const double> tau, std::span<const double> wx,
                 std::span<const double> zx, const GasParams& g);

// Density-floor constant C, 1 < gamma < 3.
double density_floor_constant(const GasParams& g, double M);

// rho(x,t) lower bound; gamma = 3 uses the exponential form. Rejects gamma > 3.
double density_floor(double t, const GasParams& g, double M);

struct CoefficientExtremes {
  double sup_abs_a0;
  double inf_a2;
  double sup_a0_plus;
};

// Certified-by-monotonicity sup/inf of a0, a2 over t in [t_lo, t_hi] and phi
// in the box implied by the a-priori bounds (and the density floor, gamma <= 3).
// M enters only through the floor; pass 0 for gamma > 3.
CoefficientExtremes sup_inf_coefficients(const GasParams& g, double t_lo,
                                         double t_hi, double M);

// Lower bound on int_{t0}^{horizon} a2 ds.  For gamma > 3, lambda < 1 this is
// the closed-form N~3; for 1 < gamma < 3 it is the quadrature N~1,
// infinite when alpha(3g-1)/(2(3-g)) + lambda >= 0.
struct TailIntegral {
  double value;       // lower bound (ignored when divergent)
  bool divergent;     // the +infinity branch
};
TailIntegral a2_tail_integral(double t0, const GasParams& g, double M,
                              double horizon);

// gamma = 3 ceiling machinery for the coefficient extremes.
double m_bar(double t0, const GasParams& g, double M);
double m_tilde(double t0, const GasParams& g, double M);

// Everything the threshold/bound formulas need, resolved once per scenario.
struct BoundsContext {
  GasParams params;
  double M = 0.0;
  double C = 0.0;                    // density-floor constant (gamma < 3)
  double M_hat = 0.0;                // (3K)^{-1/4} M (gamma = 3)
  std::optional<double> t0;          // sign-change time of a0
  // Step-5 / Case-split constants. Zero when a field does not apply.
  double Kt3 = 0.0, Kt4 = 0.0;       // sup a0, inf a2 on (0, t0]
  double Kt5 = 0.0, Kt6 = 0.0;       // sup|a0|, inf a2 on [0, inf)  (lambda>1)
  double Kh5 = 0.0, Kh6 = 0.0;       // sup a0, inf a2 on (0, t0]    (gap case)
  double N1 = 0.0, N2 = 0.0, N3 = 0.0;
  double Nt1 = 0.0, Nt3 = 0.0;       // tail-integral lower bounds
  bool Nt1_divergent = false;
};

BoundsContext make_bounds_context(const GasParams& g, double M);

// Right-hand side of the applicable threshold inequality on u_x +- phi_x at
// (x0, 0).  t0_budget is required exactly when gamma = 3.
double blowup_threshold(double phi0, const GasParams& g, const BoundsContext& b,
                        std::optional<double> t0_budget);

}  // namespace dampflow

#endif
