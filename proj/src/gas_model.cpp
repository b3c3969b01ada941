#include "dampflow/gas_model.hpp"

#include <algorithm>
#include <cmath>

namespace dampflow {

double pow_pos(double base, double e) {
  if (base <= 0.0) throw std::domain_error("pow_pos: base must be positive");
  if (e == 0.0) return 1.0;
  if (e == 1.0) return base;
  if (e == 2.0) return base * base;
  if (e == -1.0) return 1.0 / base;
  return std::exp(e * std::log(base));
}

void GasParams::validate() const {
  if (!(gamma > 1.0)) throw std::domain_error("GasParams: gamma must be > 1");
  if (!(K > 0.0)) throw std::domain_error("GasParams: K must be > 0");
  if (!(alpha >= 0.0)) throw std::domain_error("GasParams: alpha must be >= 0");
  if (!(C0 > 0.0)) throw std::domain_error("GasParams: C0 must be > 0");
  if (!std::isfinite(gamma) || !std::isfinite(K) || !std::isfinite(alpha) ||
      !std::isfinite(lambda) || !std::isfinite(C0))
    throw std::domain_error("GasParams: non-finite parameter");
}

double GasParams::K_tau() const {
  if (is_gamma3()) return std::sqrt(3.0 * K);
  return pow_pos(2.0 * std::sqrt(K * gamma) / (gamma - 1.0), 2.0 / (gamma - 1.0));
}

double GasParams::K_p() const { return K * pow_pos(K_tau(), -gamma); }

double GasParams::K_c() const {
  if (is_gamma3()) return 1.0 / std::sqrt(3.0 * K);
  return std::sqrt(K * gamma) * pow_pos(K_tau(), -(gamma + 1.0) / 2.0);
}

double GasParams::C_tilde0() const {
  const double s = C0 + pow_pos(C0, (gamma - 1.0) / 2.0);
  return 1.01 * std::max(s, pow_pos(s, 2.0 / (gamma - 1.0)));
}

double apriori_bound(const GasParams& g) {
  g.validate();
  return g.C_tilde0();
}

double pressure(double tau, const GasParams& g) {
  if (!(tau > 0.0)) throw std::domain_error("pressure: tau must be > 0");
  return g.K * pow_pos(tau, -g.gamma);
}

double sound_speed(double tau, const GasParams& g) {
  if (!(tau > 0.0)) throw std::domain_error("sound_speed: tau must be > 0");
  return std::sqrt(g.K * g.gamma) * pow_pos(tau, -(g.gamma + 1.0) / 2.0);
}

double phi_of_tau(double tau, const GasParams& g) {
  if (!(tau > 0.0)) throw std::domain_error("phi_of_tau: tau must be > 0");
  if (g.is_gamma3()) return std::sqrt(3.0 * g.K) / tau;
  return 2.0 * std::sqrt(g.K * g.gamma) / (g.gamma - 1.0) *
         pow_pos(tau, -(g.gamma - 1.0) / 2.0);
}

double tau_of_phi(double phi, const GasParams& g) {
  if (!(phi > 0.0)) throw std::domain_error("tau_of_phi: phi must be > 0");
  if (g.is_gamma3()) return std::sqrt(3.0 * g.K) / phi;
  return g.K_tau() * pow_pos(phi, -2.0 / (g.gamma - 1.0));
}

std::pair<double, double> riemann_invariants(double u, double phi) {
  return {u + phi, u - phi};
}

ThermoPoint make_thermo_point(double tau, double u, const GasParams& g) {
  ThermoPoint s;
  s.tau = tau;
  s.u = u;
  s.rho = 1.0 / tau;
  s.p = pressure(tau, g);
  s.c = sound_speed(tau, g);
  s.phi = phi_of_tau(tau, g);
  s.w = u + s.phi;
  s.z = u - s.phi;
  return s;
}

}  // namespace dampflow
