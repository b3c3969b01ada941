#include "dampflow/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dampflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSwitchLevel = -1.0e3;  // below this, integrate 1/y
constexpr double kRelTol = 1e-11;
constexpr double kAbsTol = 1e-13;
constexpr double kBracketTol = 1e-8;

// Cash-Karp embedded RK45, scalar.
struct StepResult {
  double y5;   // 5th-order value
  double err;  // |y5 - y4|
};

template <typename F>
StepResult rk45_step(const F& f, double t, double y, double h) {
  const double k1 = f(t, y);
  const double k2 = f(t + h / 5.0, y + h * (k1 / 5.0));
  const double k3 = f(t + 3.0 * h / 10.0, y + h * (3.0 * k1 / 40.0 + 9.0 * k2 / 40.0));
  const double k4 = f(t + 3.0 * h / 5.0,
                      y + h * (3.0 * k1 / 10.0 - 9.0 * k2 / 10.0 + 6.0 * k3 / 5.0));
  const double k5 = f(t + h, y + h * (-11.0 * k1 / 54.0 + 5.0 * k2 / 2.0 -
                                      70.0 * k3 / 27.0 + 35.0 * k4 / 27.0));
  const double k6 =
      f(t + 7.0 * h / 8.0,
        y + h * (1631.0 * k1 / 55296.0 + 175.0 * k2 / 512.0 + 575.0 * k3 / 13824.0 +
                 44275.0 * k4 / 110592.0 + 253.0 * k5 / 4096.0));
  const double y5 = y + h * (37.0 * k1 / 378.0 + 250.0 * k3 / 621.0 +
                             125.0 * k4 / 594.0 + 512.0 * k6 / 1771.0);
  const double y4 = y + h * (2825.0 * k1 / 27648.0 + 18575.0 * k3 / 48384.0 +
                             13525.0 * k4 / 55296.0 + 277.0 * k5 / 14336.0 +
                             k6 / 4.0);
  return {y5, std::abs(y5 - y4)};
}

// Advance one adaptive step; returns the accepted h and updates (t, y).
template <typename F>
void adaptive_advance(const F& f, double& t, double& y, double& h, double t_end) {
  for (;;) {
    h = std::min(h, t_end - t);
    if (h < 1e-14 * std::max(1.0, std::abs(t)))
      throw step_underflow("riccati integrator: step size underflow at t=" +
                           std::to_string(t) + ", y=" + std::to_string(y));
    const StepResult s = rk45_step(f, t, y, h);
    const double tol = kAbsTol + kRelTol * std::max(std::abs(y), std::abs(s.y5));
    if (s.err <= tol || !std::isfinite(s.err)) {
      if (!std::isfinite(s.y5) || !std::isfinite(s.err)) {
        h *= 0.25;
        continue;
      }
      t += h;
      y = s.y5;
      const double fac = s.err > 0.0 ? 0.9 * std::pow(tol / s.err, 0.2) : 5.0;
      h *= std::clamp(fac, 0.2, 5.0);
      return;
    }
    h *= std::clamp(0.9 * std::pow(tol / s.err, 0.2), 0.1, 1.0);
  }
}

}  // namespace

namespace {

RiccatiTrajectory integrate_core(const std::function<double(double, double)>& rhs_y,
                                 const std::function<double(double, double)>& rhs_r,
                                 double y0, double horizon,
                                 RiccatiVariable variable) {
  RiccatiTrajectory traj;
  traj.variable = variable;
  double t = 0.0, y = y0, h = 1e-4;
  traj.samples.emplace_back(t, y);

  // phase 1: plain variable
  while (t < horizon && y > kSwitchLevel) {
    adaptive_advance(rhs_y, t, y, h, horizon);
    traj.samples.emplace_back(t, y);
  }
  if (t >= horizon) {
    traj.status = TrajectoryStatus::alive_at_horizon;
    return traj;
  }

  // phase 2: reciprocal through the pole
  double r = 1.0 / y;
  h = 1e-6;
  while (t < horizon) {
    const double t_prev = t, r_prev = r;
    adaptive_advance(rhs_r, t, r, h, horizon);
    if (r >= 0.0) {
      // bisect the crossing by re-integrating the last step
      double lo = t_prev, hi = t;
      while (hi - lo > kBracketTol) {
        const double mid = 0.5 * (lo + hi);
        double tm = t_prev, rm = r_prev, hm = 0.5 * (mid - t_prev);
        if (hm <= 0.0) break;
        while (tm < mid) adaptive_advance(rhs_r, tm, rm, hm, mid);
        (rm >= 0.0 ? hi : lo) = mid;
      }
      traj.status = TrajectoryStatus::blew_up;
      traj.blowup_time = 0.5 * (lo + hi);
      traj.blowup_bracket = {lo, hi};
      return traj;
    }
    if (r < 1.0 / kSwitchLevel * 10.0) {
      // moved back away from the pole; resume the plain variable
      y = 1.0 / r;
      h = 1e-4;
      while (t < horizon && y > kSwitchLevel) {
        adaptive_advance(rhs_y, t, y, h, horizon);
        traj.samples.emplace_back(t, y);
      }
      if (t >= horizon) {
        traj.status = TrajectoryStatus::alive_at_horizon;
        return traj;
      }
      r = 1.0 / y;
      h = 1e-6;
      continue;
    }
    traj.samples.emplace_back(t, 1.0 / r);
  }
  traj.status = TrajectoryStatus::alive_at_horizon;
  return traj;
}

}  // namespace

RiccatiTrajectory integrate_riccati(const CoefficientSet& coeffs,
                                    const std::function<double(double)>& phi_path,
                                    double y0, double horizon,
                                    RiccatiVariable variable) {
  if (!(horizon > 0.0))
    throw std::domain_error("integrate_riccati: horizon must be > 0");
  const bool g3 = coeffs.params.is_gamma3();

  auto rhs_y = [&coeffs, &phi_path, g3](double t, double y) {
    const double phi = phi_path(t);
    if (g3)
      return -coeffs.a2(t, phi) * y * y - coeffs.a1(t, phi) * y +
             coeffs.a0(t, phi);
    return coeffs.a0(t, phi) - coeffs.a2(t, phi) * y * y;
  };
  // reciprocal r = 1/y satisfies a regular ODE through the pole
  auto rhs_r = [&coeffs, &phi_path, g3](double t, double r) {
    const double phi = phi_path(t);
    if (g3)
      return coeffs.a2(t, phi) + coeffs.a1(t, phi) * r -
             coeffs.a0(t, phi) * r * r;
    return coeffs.a2(t, phi) - coeffs.a0(t, phi) * r * r;
  };
  return integrate_core(rhs_y, rhs_r, y0, horizon, variable);
}

RiccatiTrajectory integrate_riccati_const(double a0, double a2, double y0,
                                          double horizon) {
  if (!(horizon > 0.0))
    throw std::domain_error("integrate_riccati_const: horizon must be > 0");
  if (!(a2 > 0.0))
    throw std::domain_error("integrate_riccati_const: a2 must be > 0");
  auto rhs_y = [a0, a2](double, double y) { return a0 - a2 * y * y; };
  auto rhs_r = [a0, a2](double, double r) { return a2 - a0 * r * r; };
  return integrate_core(rhs_y, rhs_r, y0, horizon, RiccatiVariable::y);
}

double riccati_const_solution(double a0, double a2, double y0, double t) {
  if (!(a2 > 0.0))
    throw std::domain_error("riccati_const_solution: a2 must be > 0");
  if (a0 > 0.0) {
    const double yeq = std::sqrt(a0 / a2);
    const double k = std::sqrt(a0 * a2);
    const double ch = std::cosh(k * t), sh = std::sinh(k * t);
    const double denom = yeq * ch + y0 * sh;
    if (denom <= 0.0) return kNaN;
    return yeq * (y0 * ch + yeq * sh) / denom;
  }
  if (a0 == 0.0) {
    const double denom = 1.0 + a2 * y0 * t;
    if (denom <= 0.0) return kNaN;
    return y0 / denom;
  }
  const double mu = std::sqrt(-a0 / a2);
  const double k = std::sqrt(-a0 * a2);
  const double arg = std::atan(y0 / mu) - k * t;
  if (arg <= -M_PI_2) return kNaN;
  return mu * std::tan(arg);
}

std::optional<double> riccati_const_pole(double a0, double a2, double y0) {
  if (!(a2 > 0.0))
    throw std::domain_error("riccati_const_pole: a2 must be > 0");
  if (a0 > 0.0) {
    const double yeq = std::sqrt(a0 / a2);
    if (y0 >= -yeq) return std::nullopt;
    return std::atanh(yeq / (-y0)) / std::sqrt(a0 * a2);
  }
  if (a0 == 0.0) {
    if (y0 >= 0.0) return std::nullopt;
    return -1.0 / (a2 * y0);
  }
  const double mu = std::sqrt(-a0 / a2);
  return (std::atan(y0 / mu) + M_PI_2) / std::sqrt(-a0 * a2);
}

namespace {

// Certified lower bound on a2 along any characteristic, from the a-priori
// bounds and (for gamma < 3) the density floor chain.
double a2_lower_bound(double s, const GasParams& g, const BoundsContext& b) {
  const double gm1 = g.gamma - 1.0;
  const double efac_exp = -g.alpha * (3.0 * g.gamma - 1.0) /
                          (2.0 * (g.gamma - 3.0) * (1.0 - g.lambda)) *
                          pow_pos(1.0 + s, 1.0 - g.lambda);
  const double base = g.K_c() * (g.gamma + 1.0) / (2.0 * gm1) *
                      pow_pos(2.0 * std::sqrt(g.K * g.gamma) / gm1,
                              -(g.gamma - 3.0) / (2.0 * gm1));
  if (g.gamma < 3.0) {
    const double stretch =
        g.lambda < 0.0 ? std::exp(-g.lambda * pow_pos(1.0 + s, 1.0 - g.lambda) /
                                  (1.0 - g.lambda))
                       : 1.0;
    return base * pow_pos(b.C, (3.0 - g.gamma) / 4.0) * std::exp(efac_exp) /
           (1.0 + stretch * s);
  }
  // gamma > 3: tau >= C~0^{-1} pins phi from above
  return base * pow_pos(g.C_tilde0(), -(g.gamma - 3.0) / 4.0) *
         std::exp(efac_exp);
}

}  // namespace

BlowupBound blowup_upper_bound(BoundKind kind, double y0, const GasParams& g,
                               const BoundsContext& b,
                               std::optional<double> eps) {
  BlowupBound out;
  out.kind = kind;
  out.y0 = y0;
  if (!(y0 < 0.0)) return out;  // below-threshold precondition not met

  if (kind == BoundKind::linear_bound_912) {
    out.predicted_upper_time = -2.0 / (g.K_c() * y0);
    return out;
  }
  if (kind == BoundKind::eps_bound_22) {
    const double e = eps ? *eps : (-y0 / b.N2) - 1.0;
    out.eps = e;
    if (!(e > 0.0) || !(b.Kt6 > 0.0)) return out;
    const double fac = 1.0 - 1.0 / ((1.0 + e) * (1.0 + e));
    out.predicted_upper_time = -1.0 / (y0 * fac * b.Kt6);
    return out;
  }
  // integral_bound_31: march the certified integral from t0
  const double t0 = b.t0.value_or(0.0);
  const double target = -1.0 / y0;
  double s = t0, acc = 0.0, f_prev = a2_lower_bound(s, g, b);
  while (s < t0 + 1.0e5) {
    const double hstep = 1e-3 * (1.0 + (s - t0));
    const double f_next = a2_lower_bound(s + hstep, g, b);
    const double inc = 0.5 * hstep * (f_prev + f_next);
    if (acc + inc >= target) {
      const double frac = inc > 0.0 ? (target - acc) / inc : 0.0;
      out.predicted_upper_time = s + frac * hstep;
      return out;
    }
    acc += inc;
    s += hstep;
    f_prev = f_next;
    if (inc < 1e-17 * target && f_next < f_prev) break;  // saturated
  }
  return out;  // bound saturated below -1/y0
}

ComparisonReport comparison_check(const RiccatiTrajectory& traj, double a0_lo,
                                  double a0_hi, double a2_lo, double a2_hi,
                                  double tol) {
  ComparisonReport rep;
  for (const auto& [t, v] : traj.samples) {
    const double slack = tol * (1.0 + std::abs(v));
    const double hi = riccati_const_solution(a0_hi, a2_lo, traj.samples[0].second, t);
    const double lo = riccati_const_solution(a0_lo, a2_hi, traj.samples[0].second, t);
    double viol = 0.0;
    if (std::isfinite(hi) && v > hi + slack) viol = v - hi;
    if (std::isfinite(lo) && v < lo - slack) viol = std::max(viol, lo - v);
    if (viol > 0.0) {
      rep.ok = false;
      if (!rep.first_bad_time) rep.first_bad_time = t;
      rep.worst_violation = std::max(rep.worst_violation, viol);
    }
  }
  return rep;
}

}  // namespace dampflow
