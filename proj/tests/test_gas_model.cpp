#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dampflow/gas_model.hpp"

using namespace dampflow;

static const GasParams g2{2.0, 1.0, 0.5, 0.0, 2.0};
static const GasParams g3{3.0, 1.0 / 3.0, 0.5, 0.0, 2.0};
static const GasParams g5{5.0, 1.0, 0.4, 2.0, 2.0};

TEST_CASE("pressure and sound speed, gamma=2, K=1") {
  CHECK(pressure(2.0, g2) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(sound_speed(2.0, g2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(pressure(1.0, g2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(pressure(0.0, g2), std::domain_error);
  CHECK_THROWS_AS(sound_speed(-1.0, g2), std::domain_error);
}

TEST_CASE("derived constants, gamma=2") {
  CHECK(g2.K_tau() == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(g2.K_p() == doctest::Approx(1.0 / 64.0).epsilon(1e-14));
  // p = K_p phi^{2 gamma/(gamma-1)} must agree with p = K tau^{-gamma}
  for (double tau : {0.25, 0.5, 1.0, 2.0, 7.0}) {
    const double phi = phi_of_tau(tau, g2);
    CHECK(g2.K_p() * pow_pos(phi, 4.0) ==
          doctest::Approx(pressure(tau, g2)).epsilon(1e-12));
    CHECK(g2.K_c() * pow_pos(phi, 3.0) ==
          doctest::Approx(sound_speed(tau, g2)).epsilon(1e-12));
  }
}

TEST_CASE("gamma = 3 closed forms, K = 1/3") {
  CHECK(g3.is_gamma3());
  CHECK(g3.K_tau() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g3.K_c() == doctest::Approx(1.0).epsilon(1e-14));
  for (double tau : {0.5, 1.0, 3.0}) {
    CHECK(phi_of_tau(tau, g3) == doctest::Approx(1.0 / tau).epsilon(1e-14));
    // c = K_c phi^2 = tau^{-2}
    CHECK(sound_speed(tau, g3) ==
          doctest::Approx(1.0 / (tau * tau)).epsilon(1e-13));
  }
}

TEST_CASE("phi/tau round trip and monotonicity") {
  for (const GasParams& g : {g2, g3, g5}) {
    double prev_phi = -1.0;
    for (double tau : {0.1, 0.3, 1.0, 4.0, 20.0}) {
      const double phi = phi_of_tau(tau, g);
      CHECK(tau_of_phi(phi, g) == doctest::Approx(tau).epsilon(1e-12));
      if (prev_phi > 0.0) CHECK(phi < prev_phi);  // phi decreases with tau
      prev_phi = phi;
    }
  }
}

TEST_CASE("a-priori bound constant") {
  // C~0 = 1.01 * max{C0 + C0^{(g-1)/2}, (C0 + C0^{(g-1)/2})^{2/(g-1)}}
  const double s = 2.0 + std::sqrt(2.0);
  CHECK(g2.C_tilde0() == doctest::Approx(1.01 * s * s).epsilon(1e-14));
  CHECK(apriori_bound(g2) == g2.C_tilde0());
  CHECK(g2.C_tilde0() > g2.C0);
  CHECK(1.0 / g2.C_tilde0() < 1.0 / g2.C0);
  // gamma = 3: s = C0 + C0, max(s, s) * 1.01
  CHECK(g3.C_tilde0() == doctest::Approx(1.01 * 4.0).epsilon(1e-14));
}

TEST_CASE("riemann invariants and thermo point") {
  auto [w, z] = riemann_invariants(0.3, 1.2);
  CHECK(w == doctest::Approx(1.5));
  CHECK(z == doctest::Approx(-0.9));
  const ThermoPoint tp = make_thermo_point(2.0, 0.1, g2);
  CHECK(tp.rho == doctest::Approx(0.5));
  CHECK(tp.w == doctest::Approx(0.1 + tp.phi));
  CHECK(tp.z == doctest::Approx(0.1 - tp.phi));
  CHECK(tp.c == doctest::Approx(sound_speed(2.0, g2)));
}

TEST_CASE("parameter validation") {
  GasParams bad = g2;
  bad.gamma = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = g2;
  bad.K = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = g2;
  bad.alpha = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = g2;
  bad.C0 = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  CHECK_THROWS_AS(pow_pos(-1.0, 0.5), std::domain_error);
}
