#ifndef DAMPFLOW_RICCATI_HPP
#define DAMPFLOW_RICCATI_HPP

#include <functional>
#include <optional>
#include <vector>

#include "dampflow/coeff_lab.hpp"

namespace dampflow {

enum class RiccatiVariable { y, q, y1, q1 };
enum class TrajectoryStatus { alive_at_horizon, blew_up };

struct step_underflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RiccatiTrajectory {
  RiccatiVariable variable = RiccatiVariable::y;
  std::vector<std::pair<double, double>> samples;  // (t, value)
  TrajectoryStatus status = TrajectoryStatus::alive_at_horizon;
  std::optional<double> blowup_time;
  std::optional<std::pair<double, double>> blowup_bracket;
};

// Integrate y' = a0 - a2 y^2 (gamma != 3) or y' = -a2 y^2 - a1 y + a0
// (gamma = 3) with phi supplied along the characteristic by phi_path.
// Once y drops below the switch level the reciprocal is integrated through
// the pole and the blow-up time is located by bisection on 1/y = 0.
RiccatiTrajectory integrate_riccati(const CoefficientSet& coeffs,
                                    const std::function<double(double)>& phi_path,
                                    double y0, double horizon,
                                    RiccatiVariable variable = RiccatiVariable::y);

// Same integrator on y' = a0 - a2 y^2 with fixed coefficients; the direct
// harness for the exact-solution oracles.
RiccatiTrajectory integrate_riccati_const(double a0, double a2, double y0,
                                          double horizon);

// Exact solution of y' = a0 - a2 y^2 with constant coefficients (a2 > 0).
double riccati_const_solution(double a0, double a2, double y0, double t);
// Pole time of the same solution, if it blows up.
std::optional<double> riccati_const_pole(double a0, double a2, double y0);

enum class BoundKind { integral_bound_31, eps_bound_22, linear_bound_912 };

struct BlowupBound {
  BoundKind kind;
  std::optional<double> predicted_upper_time;  // none = bound saturated
  double y0 = 0.0;
  double eps = 0.0;  // eps_bound_22 only
};

// Analytic upper bounds on the blow-up time.
//  - linear_bound_912 (gamma = 3): t* = -2/(K_c y0).
//  - eps_bound_22 (gamma > 3, lambda > 1): time where
//    (1 - (1+eps)^{-2}) * Kt6 * t reaches -1/y0; eps defaults to the maximal
//    slack -y0/N2 - 1.
//  - integral_bound_31: first time the certified lower bound on
//    int_{t0}^{t} a2 ds exceeds -1/y_at_t0; saturation reported as none.
BlowupBound blowup_upper_bound(BoundKind kind, double y0, const GasParams& g,
                               const BoundsContext& b,
                               std::optional<double> eps = std::nullopt);

struct ComparisonReport {
  bool ok = true;
  double worst_violation = 0.0;
  std::optional<double> first_bad_time;
};

// Check y_sub(t) <= y(t) <= y_super(t) pointwise, where the envelopes are the
// exact constant-coefficient solutions built from the coefficient box
// [a0_lo, a0_hi] x [a2_lo, a2_hi].
ComparisonReport comparison_check(const RiccatiTrajectory& traj, double a0_lo,
                                  double a0_hi, double a2_lo, double a2_hi,
                                  double tol = 1e-6);

}  // namespace dampflow

#endif
