#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dampflow/verifier.hpp"

using namespace dampflow;

namespace {

const GasParams g2{2.0, 1.0, 0.5, 0.5, 2.0};
const GasParams g3{3.0, 1.0 / 3.0, 0.5, 0.0, 2.0};
const GasParams g5{5.0, 1.0, 0.4, 2.0, 2.0};
const GasParams od{2.0, 1.0, 0.5, -1.0, 2.0};  // over-damped branch

RunResult small_run(const GasParams& g, Profile profile, double horizon,
                    Grid1D grid) {
  RunOptions opt;
  opt.horizon = horizon;
  opt.snapshot_cadence = horizon / 4.0;
  return run(grid, profile, g, opt);
}

Profile const_profile(double tau, double u) {
  Profile p;
  p.kind = Profile::Kind::constant;
  p.tau_bar = tau;
  p.u_mean = u;
  return p;
}

double run_M(const RunResult& res, const GasParams& g) {
  const FlowState& s0 = res.snapshots.front();
  return ceiling_M(s0.tau, s0.A, s0.B, g);
}

}  // namespace

TEST_CASE("a-priori check passes on a benign run and reports margins") {
  const Grid1D grid{0.0, 1.0, 64, Boundary::periodic};
  const RunResult res = small_run(g2, const_profile(1.0, 0.3), 1.0, grid);
  const CheckResult r = check_apriori(res.snapshots, grid, g2);
  CHECK(r.status == CheckStatus::pass);
  CHECK(r.name == "check_apriori");
  // constant tau = 1: worst margin is the decayed |u| against C~0
  CHECK(r.worst_margin > 0.0);
  CHECK(r.worst_margin <= g2.C_tilde0() - 0.3 * damping_factor(0.0, 1.0, g2) + 1e-9);
}

TEST_CASE("a-priori check fails at a planted cell") {
  const Grid1D grid{0.0, 1.0, 64, Boundary::periodic};
  RunResult res = small_run(g2, const_profile(1.0, 0.0), 1.0, grid);
  auto& mid = res.snapshots[2];
  mid.u[17] = 2.0 * g2.C_tilde0();
  const CheckResult r = check_apriori(res.snapshots, grid, g2);
  CHECK(r.status == CheckStatus::fail);
  CHECK(r.worst_margin < 0.0);
  CHECK(r.worst_x == doctest::Approx(grid.x_center(17)));
  CHECK(r.worst_t == doctest::Approx(mid.t));
}

TEST_CASE("density floor check across regimes") {
  const Grid1D grid{0.0, 1.0, 64, Boundary::periodic};
  // gamma = 2 constant state: rho constant, floor decays
  {
    const RunResult res = small_run(g2, const_profile(1.0, 0.0), 1.0, grid);
    const CheckResult r =
        check_density_floor(res.snapshots, grid, g2, run_M(res, g2));
    CHECK(r.status == CheckStatus::pass);
    CHECK(r.worst_margin > 0.0);
  }
  // gamma = 3 constant state against C0^{-1} e^{-M^ t}
  {
    const RunResult res = small_run(g3, const_profile(1.0, 0.0), 1.0, grid);
    const CheckResult r =
        check_density_floor(res.snapshots, grid, g3, run_M(res, g3));
    CHECK(r.status == CheckStatus::pass);
  }
  // gamma > 3: open problem, not applicable
  {
    const RunResult res = small_run(g5, const_profile(1.0, 0.0), 1.0, grid);
    const CheckResult r =
        check_density_floor(res.snapshots, grid, g5, run_M(res, g5));
    CHECK(r.status == CheckStatus::not_applicable);
  }
  // planted vacuum-approach: inflate tau far above the floor's reciprocal
  {
    RunResult res = small_run(g2, const_profile(1.0, 0.0), 1.0, grid);
    res.snapshots[1].tau[5] = 1e9;
    res.snapshots[1].rho[5] = 1e-9;
    const CheckResult r =
        check_density_floor(res.snapshots, grid, g2, run_M(res, g2));
    CHECK(r.status == CheckStatus::fail);
    CHECK(r.worst_x == doctest::Approx(grid.x_center(5)));
  }
}

TEST_CASE("G/H ceiling check") {
  const Grid1D grid{0.0, 1.0, 64, Boundary::periodic};
  for (const GasParams& g : {g2, g3, od}) {
    const RunResult res = small_run(g, const_profile(1.0, 0.0), 1.0, grid);
    const CheckResult r =
        check_GH_ceiling(res.snapshots, grid, g, run_M(res, g));
    CHECK(r.status == CheckStatus::pass);
  }
  // gamma > 3 has no control machinery
  const RunResult res5 = small_run(g5, const_profile(1.0, 0.0), 1.0, grid);
  CHECK(check_GH_ceiling(res5.snapshots, grid, g5, run_M(res5, g5)).status ==
        CheckStatus::not_applicable);
  // planted gradient spike breaks the ceiling
  RunResult res = small_run(g2, const_profile(1.0, 0.0), 1.0, grid);
  const double M = run_M(res, g2);
  res.snapshots[2].A[9] = 100.0 * M;
  const CheckResult r = check_GH_ceiling(res.snapshots, grid, g2, M);
  CHECK(r.status == CheckStatus::fail);
  CHECK(r.worst_x == doctest::Approx(grid.x_center(9)));
}

TEST_CASE("riccati residual vanishes for the undamped constant state") {
  const GasParams euler{2.0, 1.0, 0.0, 0.0, 2.0};
  const Grid1D grid{0.0, 1.0, 64, Boundary::periodic};
  RunOptions opt;
  opt.horizon = 0.2;
  opt.fixed_dt = true;
  opt.snapshot_cadence = 0.0;  // every step; trim the clamped tail frame
  const RunResult res = run(grid, const_profile(1.0, 0.0), euler, opt);
  std::vector<FlowState> snaps = res.snapshots;
  const double h0 = snaps[1].t - snaps[0].t;
  while (snaps.size() > 2 &&
         std::abs((snaps.back().t - snaps[snaps.size() - 2].t) - h0) >
             1e-10 * h0)
    snaps.pop_back();
  const CharacteristicPath path = trace_characteristic(
      snaps, grid, euler, CharFamily::forward, 0.25, 1);
  const ResidualStats st =
      riccati_residual(path, riccati_coefficients(euler));
  CHECK(st.n_samples > 10);
  CHECK(st.max < 1e-10);
}

TEST_CASE("riccati residual rejects bad sampling") {
  CharacteristicPath path;
  path.samples.resize(3);
  CHECK_THROWS_AS(riccati_residual(path, riccati_coefficients(
                                             {2.0, 1.0, 0.0, 0.0, 2.0})),
                  std::invalid_argument);
  path.samples.resize(8);
  for (std::size_t i = 0; i < 8; ++i)
    path.samples[i].t = 0.1 * i * i;  // non-uniform
  CHECK_THROWS_AS(riccati_residual(path, riccati_coefficients(
                                             {2.0, 1.0, 0.0, 0.0, 2.0})),
                  std::invalid_argument);
}

TEST_CASE("blow-up confrontation records without asserting when not crossed") {
  const Grid1D grid{-2.0, 2.0, 256, Boundary::periodic};
  Profile p;
  p.kind = Profile::Kind::compression_pulse;
  p.tau_bar = 1.0;
  p.slope = 0.5;  // rarefactive
  p.width = 0.5;
  p.x0 = 0.0;
  const RunResult res = small_run(g2, p, 1.0, grid);
  REQUIRE(res.status == RunResult::Status::completed);
  const BoundsContext b = make_bounds_context(g2, run_M(res, g2));
  const BlowupComparison bc =
      blowup_confrontation(res, g2, b, std::nullopt);
  CHECK_FALSE(bc.threshold_crossed);
  CHECK(bc.consistent);
  CHECK_FALSE(bc.numerical_event_time.has_value());
}

TEST_CASE("verify_run aggregates and trims at the event time") {
  const Grid1D grid{0.0, 1.0, 64, Boundary::periodic};
  const RunResult res = small_run(g2, const_profile(1.0, 0.1), 1.0, grid);
  const BoundReport rep =
      verify_run(res, grid, g2, run_M(res, g2), std::nullopt);
  CHECK(rep.checks.size() == 3);
  CHECK(rep.all_applicable_pass());
  for (const auto& c : rep.checks) CHECK(c.status != CheckStatus::fail);
  // a planted failure flips the aggregate verdict
  RunResult bad = res;
  bad.snapshots[1].u[3] = 3.0 * g2.C_tilde0();
  const BoundReport brep =
      verify_run(bad, grid, g2, run_M(bad, g2), std::nullopt);
  CHECK_FALSE(brep.all_applicable_pass());
}
