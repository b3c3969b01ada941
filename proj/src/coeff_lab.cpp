#include "dampflow/coeff_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace dampflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// adaptive Simpson with recursive bisection
double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const auto& f, double a, double m, double b,
                            double fa, double fm, double fb, double whole,
                            double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol,
                              depth - 1);
}

double adaptive_simpson(const auto& f, double a, double b, double rel_tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = simpson(a, b, fa, fm, fb);
  const double tol = rel_tol * std::max(std::abs(whole), 1e-300);
  return adaptive_simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

Regime regime_of(const GasParams& g) {
  if (g.is_gamma3()) return Regime::gamma_eq_3;
  return g.gamma < 3.0 ? Regime::gamma_below_3 : Regime::gamma_above_3;
}

double CoefficientSet::integrating_exponential(double t) const {
  const GasParams& g = params;
  if (g.is_gamma3()) return 1.0;
  const double power = convention == ExponentConvention::one_minus_lambda
                           ? pow_pos(1.0 + t, 1.0 - g.lambda)
                           : pow_pos(1.0 + t, -g.lambda);
  return std::exp(g.alpha * (3.0 * g.gamma - 1.0) /
                  (2.0 * (g.gamma - 3.0) * (1.0 - g.lambda)) * power);
}

double CoefficientSet::a0(double t, double phi) const {
  const GasParams& g = params;
  const double gm1 = g.gamma - 1.0;
  if (g.is_gamma3()) {
    const double lp = std::log(phi);
    return g.alpha * lp *
           (2.0 * g.lambda * pow_pos(1.0 + t, g.lambda - 1.0) -
            g.alpha * (1.0 + lp)) /
           (4.0 * g.K_c() * pow_pos(1.0 + t, 2.0 * g.lambda));
  }
  const double gm3 = g.gamma - 3.0;
  const double num =
      g.lambda * g.alpha * gm1 * gm3 * pow_pos(1.0 + t, g.lambda - 1.0) -
      g.alpha * g.alpha * gm1 * gm1;
  return num / (g.K_c() * gm3 * gm3 * pow_pos(1.0 + t, 2.0 * g.lambda)) *
         pow_pos(phi, gm3 / (2.0 * gm1)) * integrating_exponential(t);
}

double CoefficientSet::a1(double t, double phi) const {
  const GasParams& g = params;
  if (!g.is_gamma3()) return 0.0;
  return g.alpha * (1.0 + 2.0 * std::log(phi)) /
         (2.0 * pow_pos(1.0 + t, g.lambda));
}

double CoefficientSet::a2(double t, double phi) const {
  const GasParams& g = params;
  if (g.is_gamma3()) return g.K_c();
  const double gm1 = g.gamma - 1.0;
  return g.K_c() * (g.gamma + 1.0) / (2.0 * gm1) *
         pow_pos(phi, -(g.gamma - 3.0) / (2.0 * gm1)) /
         integrating_exponential(t);
}

CoefficientSet riccati_coefficients(const GasParams& g,
                                    ExponentConvention convention) {
  g.validate();
  if (!g.is_gamma3() && g.lambda == 1.0)
    throw unsupported_regime(
        "riccati_coefficients: lambda = 1 with gamma != 3 is out of scope");
  return CoefficientSet{g, regime_of(g), convention};
}

double gradient_variable(double t, double phi, double grad, const GasParams& g,
                         ExponentConvention convention) {
  if (g.is_gamma3()) {
    return phi * grad - g.alpha * std::log(phi) /
                            (2.0 * g.K_c() * pow_pos(1.0 + t, g.lambda));
  }
  CoefficientSet cs{g, regime_of(g), convention};
  const double gm1 = g.gamma - 1.0;
  const double gm3 = g.gamma - 3.0;
  const double inner =
      pow_pos(phi, (g.gamma + 1.0) / (2.0 * gm1)) * grad -
      g.alpha * gm1 / (g.K_c() * gm3 * pow_pos(1.0 + t, g.lambda)) *
          pow_pos(phi, gm3 / (2.0 * gm1));
  return inner * cs.integrating_exponential(t);
}

std::optional<double> sign_change_time(const GasParams& g) {
  if (g.is_gamma3() || g.lambda == 1.0 || g.lambda == 0.0 || g.alpha == 0.0)
    return std::nullopt;
  const double r =
      g.alpha * (g.gamma - 1.0) / (g.lambda * (g.gamma - 3.0));
  if (!(r > 0.0)) return std::nullopt;
  const double t0 = pow_pos(r, 1.0 / (g.lambda - 1.0)) - 1.0;
  if (!(t0 > 0.0)) return std::nullopt;
  return t0;
}

double control_h(double tau, const GasParams& g) {
  if (g.is_gamma3())
    throw unsupported_regime("control_h: use control_h1 for gamma = 3");
  if (!(tau > 0.0)) throw std::domain_error("control_h: tau must be > 0");
  return 4.0 * pow_pos(g.K * g.gamma, 0.25) / (3.0 - g.gamma) *
         pow_pos(tau, (3.0 - g.gamma) / 4.0);
}

double control_h1(double tau, const GasParams& g) {
  if (!(tau > 0.0)) throw std::domain_error("control_h1: tau must be > 0");
  return pow_pos(3.0 * g.K, 0.25) * std::log(g.C_tilde0() * tau);
}

double control_G(double t, double tau, double grad, const GasParams& g) {
  const double h = g.is_gamma3() ? control_h1(tau, g) : control_h(tau, g);
  return std::sqrt(sound_speed(tau, g)) * grad +
         g.alpha / pow_pos(1.0 + t, g.lambda) * h;
}

double control_G_hat(double t, double tau, double grad, const GasParams& g) {
  const double h = g.is_gamma3() ? control_h1(tau, g) : control_h(tau, g);
  return std::sqrt(sound_speed(tau, g)) * grad +
         (g.alpha - g.lambda) / pow_pos(1.0 + t, g.lambda) * h;
}

double factor_A(double t, const GasParams& g) {
  return std::exp(g.alpha * pow_pos(1.0 + t, 1.0 - g.lambda) /
                  (2.0 * (1.0 - g.lambda)));
}

double factor_A1(double t, const GasParams& g) {
  return pow_pos(1.0 + t, 0.5 * g.alpha);
}

double ceiling_M(std::span<const double> tau, std::span<const double> wx,
                 std::span<const double> zx, const GasParams& g) {
  if (tau.size() != wx.size() || tau.size() != zx.size() || tau.empty())
    throw std::invalid_argument("ceiling_M: mismatched or empty fields");
  double sup = 0.0;
  const bool over_damped = g.lambda < 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (!std::isfinite(wx[i]) || !std::isfinite(zx[i]) ||
        !std::isfinite(tau[i]))
      throw std::domain_error("ceiling_M: non-finite initial gradients");
    double gv, hv;
    if (over_damped) {
      gv = control_G_hat(0.0, tau[i], wx[i], g);
      hv = control_G_hat(0.0, tau[i], zx[i], g);
    } else {
      gv = control_G(0.0, tau[i], wx[i], g);
      hv = control_G(0.0, tau[i], zx[i], g);
    }
    // the ceiling argument is one-sided: only upper excursions of G, H
    // threaten the density floor, so the signed sup is the right quantity
    sup = std::max({sup, gv, hv});
  }
  // for lambda < 0 the ceiling carries the factor e^{-l/(1-l)},
  // so M itself is the sup scaled back by e^{l/(1-l)}.
  if (over_damped)
    sup *= std::exp(g.lambda / (1.0 - g.lambda));
  return std::max(1.01 * sup, 1e-12);
}

double density_floor_constant(const GasParams& g, double M) {
  if (!(g.gamma < 3.0))
    throw unsupported_regime("density_floor_constant: requires 1 < gamma < 3");
  const double a = pow_pos(g.C0, (3.0 - g.gamma) / 4.0);
  const double b =
      (3.0 - g.gamma) / 4.0 * pow_pos(g.K * g.gamma, -0.25) * M;
  return pow_pos(std::max(a, b), 4.0 / (g.gamma - 3.0));
}

double density_floor(double t, const GasParams& g, double M) {
  if (g.gamma > 3.0)
    throw unsupported_regime("density_floor: open problem for gamma > 3");
  if (!(t >= 0.0)) throw std::domain_error("density_floor: t must be >= 0");
  if (g.is_gamma3()) {
    const double M_hat = pow_pos(3.0 * g.K, -0.25) * M;
    if (g.lambda >= 0.0) return std::exp(-M_hat * t) / g.C0;
    const double stretch = std::exp(-g.lambda *
                                    pow_pos(1.0 + t, 1.0 - g.lambda) /
                                    (1.0 - g.lambda));
    return std::exp(-M_hat * t * stretch) / g.C0;
  }
  const double C = density_floor_constant(g, M);
  if (g.lambda >= 0.0)
    return C * pow_pos(1.0 + t, 4.0 / (g.gamma - 3.0));
  const double stretch = std::exp(-g.lambda *
                                  pow_pos(1.0 + t, 1.0 - g.lambda) /
                                  (1.0 - g.lambda));
  return C * pow_pos(1.0 + stretch * t, 4.0 / (g.gamma - 3.0));
}

namespace {

// phi endpoints that can realize the extremes of a0 / a2 at time t, given the
// a-priori box and (for gamma <= 3) the density floor.
std::vector<double> extreme_phis(const GasParams& g, double M, double t) {
  const double phi_max = phi_of_tau(1.0 / g.C_tilde0(), g);
  if (g.gamma > 3.0) {
    // |a0| increasing and a2 decreasing in phi: both extremes at phi_max.
    return {phi_max};
  }
  const double tau_max = 1.0 / density_floor(t, g, M);
  const double phi_min = phi_of_tau(tau_max, g);
  if (g.is_gamma3()) return {phi_min, phi_max};
  // 1 < gamma < 3: |a0| decreasing and a2 increasing in phi.
  return {phi_min};
}

struct ExtremeScan {
  double sup_abs_a0 = 0.0;
  double inf_a2 = kInf;
  double sup_a0_plus = 0.0;
};

ExtremeScan scan(const CoefficientSet& cs, const GasParams& g, double M,
                 double t_lo, double t_hi, std::size_t n) {
  ExtremeScan r;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = t_lo + (t_hi - t_lo) * double(i) / double(n);
    for (double phi : extreme_phis(g, M, t)) {
      const double a0 = cs.a0(t, phi);
      r.sup_abs_a0 = std::max(r.sup_abs_a0, std::abs(a0));
      r.sup_a0_plus = std::max(r.sup_a0_plus, std::max(a0, 0.0));
      r.inf_a2 = std::min(r.inf_a2, cs.a2(t, phi));
    }
    if (g.is_gamma3() && g.alpha > 0.0) {
      // a0 is quadratic in ln(phi); include the interior vertex when it
      // falls inside the phi box.
      auto box = extreme_phis(g, M, t);
      const double lmin = std::log(box.front()), lmax = std::log(box.back());
      const double lv = (2.0 * g.lambda * pow_pos(1.0 + t, g.lambda - 1.0) -
                         g.alpha) /
                        (2.0 * g.alpha);
      if (lv > lmin && lv < lmax) {
        const double a0 = cs.a0(t, std::exp(lv));
        r.sup_abs_a0 = std::max(r.sup_abs_a0, std::abs(a0));
        r.sup_a0_plus = std::max(r.sup_a0_plus, std::max(a0, 0.0));
      }
    }
  }
  return r;
}

bool close_scan(const ExtremeScan& a, const ExtremeScan& b) {
  auto near = [](double x, double y) {
    return std::abs(x - y) <= 5e-3 * std::max({std::abs(x), std::abs(y), 1e-14});
  };
  return near(a.sup_abs_a0, b.sup_abs_a0) && near(a.inf_a2, b.inf_a2) &&
         near(a.sup_a0_plus, b.sup_a0_plus);
}

}  // namespace

CoefficientExtremes sup_inf_coefficients(const GasParams& g, double t_lo,
                                         double t_hi, double M) {
  const CoefficientSet cs = riccati_coefficients(g);
  const bool infinite = !std::isfinite(t_hi);
  double T = t_hi;
  if (infinite) {
    if (g.gamma < 3.0)
      throw std::runtime_error(
          "sup_inf_coefficients: no finite sup over an unbounded interval "
          "for gamma < 3 (coefficients do not decay)");
    T = 1.0e4;
  }
  if (!(T > t_lo)) throw std::domain_error("sup_inf_coefficients: empty interval");

  const double decades = std::log10((1.0 + T) / (1.0 + t_lo));
  std::size_t n = static_cast<std::size_t>(
      std::min(2.0e5, 1.0e4 * std::max(1.0, decades)));
  ExtremeScan coarse = scan(cs, g, M, t_lo, T, n);
  ExtremeScan fine = scan(cs, g, M, t_lo, T, 2 * n);
  if (!close_scan(coarse, fine)) fine = scan(cs, g, M, t_lo, T, 4 * n);

  if (infinite) {
    // the sup must be attained inside the window: require decay in the tail
    const ExtremeScan tail = scan(cs, g, M, 0.9 * T, T, n / 10 + 16);
    if (tail.sup_abs_a0 >= 0.999 * fine.sup_abs_a0 && fine.sup_abs_a0 > 0.0)
      throw std::runtime_error("sup_inf_coefficients: no finite sup (|a0| "
                               "does not decay on the unbounded interval)");
    // a2 tends to a positive limit for lambda > 1; fold the limit in
    if (g.lambda > 1.0) {
      for (double phi : extreme_phis(g, M, T)) {
        const double gm1 = g.gamma - 1.0;
        const double limit = g.K_c() * (g.gamma + 1.0) / (2.0 * gm1) *
                             pow_pos(phi, -(g.gamma - 3.0) / (2.0 * gm1));
        fine.inf_a2 = std::min(fine.inf_a2, limit);
      }
    }
  }
  return {fine.sup_abs_a0, fine.inf_a2, fine.sup_a0_plus};
}

TailIntegral a2_tail_integral(double t0, const GasParams& g, double M,
                              double horizon) {
  if (!(t0 >= 0.0)) throw std::domain_error("a2_tail_integral: t0 must be >= 0");
  if (g.is_gamma3())
    throw unsupported_regime("a2_tail_integral: gamma = 3 uses m_tilde instead");
  const double gm1 = g.gamma - 1.0;
  if (g.gamma > 3.0) {
    if (g.lambda >= 1.0 || g.alpha == 0.0) return {0.0, true};
    // closed-form N~3
    const double v =
        g.K_c() * (g.gamma + 1.0) / (2.0 * gm1) *
        pow_pos(2.0 * std::sqrt(g.K * g.gamma) / gm1,
                -(g.gamma - 3.0) / (2.0 * gm1)) *
        pow_pos(g.C_tilde0(), -(g.gamma - 3.0) / 4.0) *
        2.0 * (g.gamma - 3.0) / (g.alpha * (3.0 * g.gamma - 1.0)) *
        std::exp(-g.alpha * (3.0 * g.gamma - 1.0) /
                 (2.0 * (g.gamma - 3.0) * (1.0 - g.lambda)));
    return {v, false};
  }
  // 1 < gamma < 3: quadrature branch
  const double crit = g.alpha * (3.0 * g.gamma - 1.0) / (2.0 * (3.0 - g.gamma)) +
                      g.lambda;
  if (crit >= 0.0) return {0.0, true};
  const double C = density_floor_constant(g, M);
  const double pref = g.K_c() * (g.gamma + 1.0) / (2.0 * gm1) *
                      pow_pos(2.0 * std::sqrt(g.K * g.gamma) / gm1,
                              -(g.gamma - 3.0) / (2.0 * gm1)) *
                      pow_pos(C, (3.0 - g.gamma) / 4.0);
  auto integrand = [&](double s) {
    const double pw = pow_pos(1.0 + s, 1.0 - g.lambda) / (1.0 - g.lambda);
    const double denom = std::exp(g.lambda * pw) + s;
    return pref * std::exp(crit * pw) / denom;
  };
  // exponentially decaying integrand: truncate where it falls far below the
  // left-endpoint value
  const double peak = integrand(t0);
  double hi = std::isfinite(horizon) ? horizon : t0 + 1.0;
  if (!std::isfinite(horizon)) {
    while (integrand(hi) > 1e-16 * peak && hi < t0 + 1e6) hi = t0 + 2.0 * (hi - t0);
  }
  if (!(hi > t0)) return {0.0, false};
  return {adaptive_simpson(integrand, t0, hi, 1e-8), false};
}

double m_bar(double t0, const GasParams& g, double M) {
  if (!g.is_gamma3()) throw unsupported_regime("m_bar: gamma = 3 only");
  if (!(t0 > 0.0)) throw std::domain_error("m_bar: t0 must be > 0");
  const double M_hat = pow_pos(3.0 * g.K, -0.25) * M;
  const double s3k = std::sqrt(3.0 * g.K);
  double te = t0;
  if (g.lambda < 0.0)
    te = t0 * std::exp(-g.lambda / (1.0 - g.lambda) *
                       pow_pos(1.0 + t0, -g.lambda));
  const double decay = s3k * std::exp(-M_hat * te);
  return std::max({s3k * g.C_tilde0(), 1.0 / (s3k * g.C_tilde0()), decay,
                   1.0 / decay});
}

double m_tilde(double t0, const GasParams& g, double M) {
  if (!g.is_gamma3()) throw unsupported_regime("m_tilde: gamma = 3 only");
  const double Kc = g.K_c();
  const double L = std::log(m_bar(t0, g, M));
  const double w1 = std::max(pow_pos(1.0 + t0, -g.lambda), 1.0);
  const double w2 = std::max(pow_pos(1.0 + t0, -2.0 * g.lambda), 1.0);
  const double a1_max = (0.5 * g.alpha + g.alpha * L) * w1;
  const double a0_max = (std::abs(g.lambda) * g.alpha / (2.0 * Kc) * L +
                         g.alpha * g.alpha / (4.0 * Kc) * (L + L * L)) *
                        w2;
  const double r1 = a1_max / Kc;
  return r1 + std::sqrt(r1 * r1 + 2.0 * a0_max / Kc);
}

BoundsContext make_bounds_context(const GasParams& g, double M) {
  g.validate();
  BoundsContext b;
  b.params = g;
  b.M = M;
  if (g.gamma < 3.0) b.C = density_floor_constant(g, M);
  if (g.is_gamma3()) {
    b.M_hat = pow_pos(3.0 * g.K, -0.25) * M;
    return b;
  }
  if (g.lambda == 1.0) return b;  // solver-only regime; no Riccati constants
  b.t0 = sign_change_time(g);
  const double ratio = g.alpha * (g.gamma - 1.0) / (g.gamma - 3.0);
  if (g.gamma < 3.0) {
    if (g.alpha > 0.0 && g.lambda < ratio) {
      const double t0 = b.t0.value();
      const auto ex = sup_inf_coefficients(g, 0.0, t0, M);
      b.Kt3 = ex.sup_a0_plus;
      b.Kt4 = ex.inf_a2;
      const TailIntegral tail = a2_tail_integral(t0, g, M, kInf);
      b.Nt1 = tail.value;
      b.Nt1_divergent = tail.divergent;
      const double inv = tail.divergent ? 0.0 : 1.0 / tail.value;
      b.N1 = std::max(inv, std::sqrt(b.Kt3 / b.Kt4));
    }
    return b;
  }
  // gamma > 3
  if (g.lambda > 1.0) {
    const auto ex = sup_inf_coefficients(g, 0.0, kInf, 0.0);
    b.Kt5 = ex.sup_abs_a0;
    b.Kt6 = ex.inf_a2;
    b.N2 = std::sqrt(b.Kt5 / b.Kt6);
  } else {
    const double t0 = b.t0.value_or(0.0);
    if (t0 > 0.0) {
      const auto ex = sup_inf_coefficients(g, 0.0, t0, 0.0);
      b.Kh5 = ex.sup_a0_plus;
      b.Kh6 = ex.inf_a2;
    }
    const TailIntegral tail = a2_tail_integral(t0, g, 0.0, kInf);
    b.Nt3 = tail.value;
    const double inv = tail.divergent ? 0.0 : 1.0 / tail.value;
    const double k_ratio = (t0 > 0.0) ? std::sqrt(b.Kh5 / b.Kh6) : 0.0;
    b.N3 = std::max(inv, k_ratio);
  }
  return b;
}

double blowup_threshold(double phi0, const GasParams& g, const BoundsContext& b,
                        std::optional<double> t0_budget) {
  if (!(phi0 > 0.0)) throw std::domain_error("blowup_threshold: phi0 must be > 0");
  const double gm1 = g.gamma - 1.0;
  if (g.is_gamma3()) {
    if (!t0_budget)
      throw std::invalid_argument("blowup_threshold: gamma = 3 needs t0_budget");
    const double t0 = *t0_budget;
    const double Kc = g.K_c();
    return g.alpha / (2.0 * Kc) * std::log(phi0) / phi0 -
           std::max(2.0 / (Kc * t0), m_tilde(t0, g, b.M));
  }
  if (g.lambda == 1.0)
    throw unsupported_regime("blowup_threshold: lambda = 1 with gamma != 3");
  const double K3 = g.alpha * gm1 / (g.K_c() * (g.gamma - 3.0));
  const double p1 = pow_pos(phi0, -2.0 / gm1);
  const double p2 = pow_pos(phi0, -(g.gamma + 1.0) / (2.0 * gm1));
  const double efac = std::exp(-g.alpha * (3.0 * g.gamma - 1.0) /
                               (2.0 * (g.gamma - 3.0) * (1.0 - g.lambda)));
  const double ratio = g.alpha * gm1 / (g.gamma - 3.0);
  if (g.gamma < 3.0) {
    if (g.alpha == 0.0 || g.lambda >= ratio) return K3 * p1;  // plain branch: no tail correction needed
    return K3 * p1 - b.N1 * efac * p2;                        // sharpened form with tail correction
  }
  const double N = g.lambda > 1.0 ? b.N2 : b.N3;
  return K3 * p1 - N * efac * p2;
}

}  // namespace dampflow
