#include "dampflow/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dampflow {

std::string check_status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::not_applicable: return "not_applicable";
  }
  return "unknown";
}

bool BoundReport::all_applicable_pass() const {
  for (const auto& c : checks)
    if (c.status == CheckStatus::fail) return false;
  if (blowup && !blowup->consistent) return false;
  return true;
}

namespace {

void record_worst(CheckResult& r, double margin, double x, double t) {
  if (margin < r.worst_margin) {
    r.worst_margin = margin;
    r.worst_x = x;
    r.worst_t = t;
  }
}

}  // namespace

CheckResult check_apriori(const std::vector<FlowState>& snaps,
                          const Grid1D& grid, const GasParams& g) {
  CheckResult r;
  r.name = "check_apriori";
  r.worst_margin = std::numeric_limits<double>::infinity();
  const double ct0 = g.C_tilde0();
  const double tau_floor = 1.0 / ct0;
  for (const auto& s : snaps) {
    for (int i = 0; i < grid.n_cells; ++i) {
      const double m =
          std::min(ct0 - std::abs(s.u[i]), s.tau[i] - tau_floor);
      record_worst(r, m, grid.x_center(i), s.t);
    }
  }
  r.status = (r.worst_margin >= 0.0) ? CheckStatus::pass : CheckStatus::fail;
  return r;
}

CheckResult check_density_floor(const std::vector<FlowState>& snaps,
                                const Grid1D& grid, const GasParams& g,
                                double M) {
  CheckResult r;
  r.name = "check_density_floor";
  if (g.gamma > 3.0) {
    r.status = CheckStatus::not_applicable;
    r.note = "no density floor is available for gamma > 3";
    return r;
  }
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& s : snaps) {
    const double floor = density_floor(s.t, g, M);
    for (int i = 0; i < grid.n_cells; ++i)
      record_worst(r, s.rho[i] - floor, grid.x_center(i), s.t);
  }
  r.status = (r.worst_margin >= 0.0) ? CheckStatus::pass : CheckStatus::fail;
  return r;
}

CheckResult check_GH_ceiling(const std::vector<FlowState>& snaps,
                             const Grid1D& grid, const GasParams& g,
                             double M) {
  CheckResult r;
  r.name = "check_GH_ceiling";
  if (g.gamma > 3.0) {
    r.status = CheckStatus::not_applicable;
    r.note = "control-function ceilings cover gamma <= 3 only";
    return r;
  }
  r.worst_margin = std::numeric_limits<double>::infinity();
  const bool over_damped = g.lambda < 0.0;
  for (const auto& s : snaps) {
    const double ceiling =
        over_damped ? M * std::exp(-g.lambda / (1.0 - g.lambda) *
                                   pow_pos(1.0 + s.t, 1.0 - g.lambda))
                    : M;
    for (int i = 0; i < grid.n_cells; ++i) {
      double gv, hv;
      if (g.is_gamma3()) {
        const double cr = std::sqrt(s.c[i]);
        const double pump = g.alpha / pow_pos(1.0 + s.t, g.lambda) *
                            control_h1(s.tau[i], g);
        gv = cr * s.A[i] + pump;
        hv = cr * s.B[i] + pump;
      } else if (over_damped) {
        gv = control_G_hat(s.t, s.tau[i], s.A[i], g);
        hv = control_G_hat(s.t, s.tau[i], s.B[i], g);
      } else {
        gv = control_G(s.t, s.tau[i], s.A[i], g);
        hv = control_G(s.t, s.tau[i], s.B[i], g);
      }
      record_worst(r, ceiling - std::max(gv, hv), grid.x_center(i), s.t);
    }
  }
  r.status = (r.worst_margin >= 0.0) ? CheckStatus::pass : CheckStatus::fail;
  return r;
}

ResidualStats riccati_residual(const CharacteristicPath& path,
                               const CoefficientSet& coeffs) {
  const auto& sm = path.samples;
  if (sm.size() < 5)
    throw std::invalid_argument(
        "riccati_residual: need at least 5 path samples");
  const double h = sm[1].t - sm[0].t;
  if (!(h > 0.0))
    throw std::invalid_argument("riccati_residual: samples must advance in t");
  for (std::size_t i = 1; i + 1 < sm.size(); ++i) {
    const double hi = sm[i + 1].t - sm[i].t;
    if (std::abs(hi - h) > 1e-9 * h)
      throw std::invalid_argument(
          "riccati_residual: samples must be uniformly spaced");
  }
  ResidualStats st;
  double sq = 0.0;
  for (std::size_t i = 2; i + 2 < sm.size(); ++i) {
    const double dydt = (-sm[i + 2].value + 8.0 * sm[i + 1].value -
                         8.0 * sm[i - 1].value + sm[i - 2].value) /
                        (12.0 * h);
    const double y = sm[i].value;
    const double rhs = coeffs.a0(sm[i].t, sm[i].phi) -
                       coeffs.a1(sm[i].t, sm[i].phi) * y -
                       coeffs.a2(sm[i].t, sm[i].phi) * y * y;
    const double res = dydt - rhs;
    sq += res * res;
    st.max = std::max(st.max, std::abs(res));
    ++st.n_samples;
  }
  if (st.n_samples > 0) st.rms = std::sqrt(sq / st.n_samples);
  return st;
}

BlowupComparison blowup_confrontation(const RunResult& run, const GasParams& g,
                                      const BoundsContext& bounds,
                                      std::optional<double> t0_budget) {
  BlowupComparison bc;
  bc.threshold = blowup_threshold(run.init.phi0, g, bounds, t0_budget);
  bc.measured_slope = run.init.slope_fwd;
  bc.threshold_crossed = bc.measured_slope < bc.threshold;

  for (const auto& e : run.events)
    if (e.type == Event::Type::gradient_blowup) {
      bc.numerical_event_time = e.time;
      break;
    }

  if (bc.threshold_crossed) {
    const double y0 = gradient_variable(0.0, run.init.phi0,
                                        run.init.slope_fwd, g);
    BoundKind kind;
    if (g.is_gamma3())
      kind = BoundKind::linear_bound_912;
    else if (g.gamma > 3.0 && g.lambda > 1.0)
      kind = BoundKind::eps_bound_22;
    else
      kind = BoundKind::integral_bound_31;
    const BlowupBound bb = blowup_upper_bound(kind, y0, g, bounds);
    bc.analytic_upper_bound = bb.predicted_upper_time;
    bc.consistent = bc.numerical_event_time.has_value() &&
                    (!bc.analytic_upper_bound ||
                     *bc.numerical_event_time <= 1.2 * *bc.analytic_upper_bound);
  } else {
    // the threshold is sufficient, not necessary: nothing to assert here
    bc.consistent = true;
  }
  return bc;
}

BoundReport verify_run(const RunResult& run, const Grid1D& grid,
                       const GasParams& g, double M,
                       std::optional<double> t0_budget) {
  BoundReport rep;
  // Snapshots taken at or after a detected event are outside the classical
  // phase; the bound checks stop just before it.
  std::vector<FlowState> classical;
  for (const auto& s : run.snapshots) {
    if (run.event_time && s.t >= *run.event_time) break;
    classical.push_back(s);
  }
  if (classical.empty() && !run.snapshots.empty())
    classical.push_back(run.snapshots.front());

  rep.checks.push_back(check_apriori(classical, grid, g));
  rep.checks.push_back(check_density_floor(classical, grid, g, M));
  rep.checks.push_back(check_GH_ceiling(classical, grid, g, M));

  try {
    BoundsContext bounds = make_bounds_context(g, M);
    rep.blowup = blowup_confrontation(run, g, bounds, t0_budget);
  } catch (const unsupported_regime&) {
    // no threshold theory applies here; field checks still stand
  } catch (const std::invalid_argument&) {
    // gamma = 3 without a t0 budget: skip the confrontation
  }
  return rep;
}

}  // namespace dampflow
