#ifndef DAMPFLOW_GAS_MODEL_HPP
#define DAMPFLOW_GAS_MODEL_HPP

#include <stdexcept>
#include <utility>

namespace dampflow {

// Polytropic gas parameters together with the damping law alpha/(1+t)^lambda
// and the initial-data bound C0. All derived constants hang off this record.
struct GasParams {
  double gamma;   // adiabatic index, > 1
  double K;       // pressure constant, > 0
  double alpha;   // damping amplitude, >= 0
  double lambda;  // damping decay exponent
  double C0;      // C^1 bound on the initial data, > 0

  void validate() const;
  bool is_gamma3() const { return gamma == 3.0; }

  // tau = K_tau * phi^{-2/(gamma-1)}
  double K_tau() const;
  // p = K_p * phi^{2 gamma/(gamma-1)}.  Implemented as K * K_tau^{-gamma}.
  double K_p() const;
  // c = K_c * phi^{(gamma+1)/(gamma-1)}; for gamma = 3, K_c = 1/sqrt(3K).
  double K_c() const;
  // Velocity ceiling / specific-volume floor constant of the a-priori bound,
  // fixed at 1.01x the strict lower limit.
  double C_tilde0() const;
};

// base^e computed through exp/log so tiny bases with fractional exponents do
// not underflow prematurely. base must be > 0.
double pow_pos(double base, double e);

double pressure(double tau, const GasParams& g);
double sound_speed(double tau, const GasParams& g);
double phi_of_tau(double tau, const GasParams& g);
double tau_of_phi(double phi, const GasParams& g);

// (w, z) = (u + phi, u - phi)
std::pair<double, double> riemann_invariants(double u, double phi);

double apriori_bound(const GasParams& g);

// Per-point thermodynamic record derived from (tau, u).
struct ThermoPoint {
  double tau, u;
  double rho, p, c, phi, w, z;
};
ThermoPoint make_thermo_point(double tau, double u, const GasParams& g);

}  // namespace dampflow

#endif
