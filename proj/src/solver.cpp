#include "dampflow/solver.hpp"

#include <algorithm>
#include <cmath>

namespace dampflow {

void Grid1D::validate() const {
  if (!(x_max > x_min)) throw std::domain_error("Grid1D: x_max must exceed x_min");
  if (n_cells < 16) throw std::domain_error("Grid1D: n_cells must be >= 16");
}

void Profile::validate() const {
  if (!(tau_bar > 0.0)) throw std::domain_error("Profile: tau_bar must be > 0");
  if (kind == Kind::sine && wavenumber < 1)
    throw std::domain_error("Profile: wavenumber must be >= 1");
  if (kind == Kind::compression_pulse && !(width > 0.0))
    throw std::domain_error("Profile: width must be > 0");
}

double Profile::tau_at(double) const { return tau_bar; }

double Profile::u_at(double x) const {
  switch (kind) {
    case Kind::constant:
      return u_mean;
    case Kind::sine:
      return u_amp * std::sin(2.0 * M_PI * wavenumber * x);
    case Kind::compression_pulse: {
      // u = s * width * g((x-x0)/width), g(xi) = xi exp(-xi^2/2): u_x(x0) = s
      const double xi = (x - x0) / width;
      return slope * width * xi * std::exp(-0.5 * xi * xi);
    }
  }
  return 0.0;
}

namespace {

inline double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

// index with boundary treatment
inline double at(const std::vector<double>& v, int i, Boundary bc) {
  const int n = static_cast<int>(v.size());
  if (bc == Boundary::periodic) return v[wrap(i, n)];
  return v[std::clamp(i, 0, n - 1)];
}

}  // namespace

void update_derived(FlowState& s, const Grid1D& grid, const GasParams& g) {
  const int n = static_cast<int>(s.tau.size());
  const double dx = grid.dx();
  auto resize_all = [&](auto&... vs) { (vs.resize(n), ...); };
  resize_all(s.rho, s.p, s.c, s.phi, s.w, s.z, s.A, s.B);
  for (int i = 0; i < n; ++i) {
    s.rho[i] = 1.0 / s.tau[i];
    s.p[i] = pressure(s.tau[i], g);
    s.c[i] = sound_speed(s.tau[i], g);
    s.phi[i] = phi_of_tau(s.tau[i], g);
    s.w[i] = s.u[i] + s.phi[i];
    s.z[i] = s.u[i] - s.phi[i];
  }
  const Boundary bc = grid.boundary;
  for (int i = 0; i < n; ++i) {
    if (bc == Boundary::constant_extrapolation && (i == 0 || i == n - 1)) {
      // one-sided at the ends
      const int j = (i == 0) ? 0 : n - 2;
      s.A[i] = (s.w[j + 1] - s.w[j]) / dx;
      s.B[i] = (s.z[j + 1] - s.z[j]) / dx;
    } else {
      s.A[i] = (at(s.w, i + 1, bc) - at(s.w, i - 1, bc)) / (2.0 * dx);
      s.B[i] = (at(s.z, i + 1, bc) - at(s.z, i - 1, bc)) / (2.0 * dx);
    }
  }
}

double gradient_proxy(const FlowState& s) {
  double m = 0.0;
  for (double a : s.A) m = std::max(m, std::abs(a));
  for (double b : s.B) m = std::max(m, std::abs(b));
  return m;
}

double max_sound_speed(const FlowState& s) {
  double m = 0.0;
  for (double c : s.c) m = std::max(m, c);
  return m;
}

double total_tau(const FlowState& s, const Grid1D& grid) {
  double sum = 0.0;
  for (double v : s.tau) sum += v;
  return sum * grid.dx();
}

FlowState initialize(const Grid1D& grid, const Profile& profile,
                     const GasParams& g, InitReport* report) {
  grid.validate();
  profile.validate();
  g.validate();
  FlowState s;
  const int n = grid.n_cells;
  s.tau.resize(n);
  s.u.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = grid.x_center(i);
    s.tau[i] = profile.tau_at(x);
    s.u[i] = profile.u_at(x);
    if (!(s.tau[i] > 0.0))
      throw std::domain_error("initialize: profile yields tau <= 0");
  }
  update_derived(s, grid, g);
  if (report) {
    double sup_u = 0.0, sup_tau = 0.0, inf_tau = s.tau[0];
    double sup_ux = 0.0, sup_taux = 0.0;
    const double dx = grid.dx();
    for (int i = 0; i < n; ++i) {
      sup_u = std::max(sup_u, std::abs(s.u[i]));
      sup_tau = std::max(sup_tau, std::abs(s.tau[i]));
      inf_tau = std::min(inf_tau, s.tau[i]);
      const double ux =
          (at(s.u, i + 1, grid.boundary) - at(s.u, i - 1, grid.boundary)) /
          (2.0 * dx);
      const double taux = (at(s.tau, i + 1, grid.boundary) -
                           at(s.tau, i - 1, grid.boundary)) /
                          (2.0 * dx);
      sup_ux = std::max(sup_ux, std::abs(ux));
      sup_taux = std::max(sup_taux, std::abs(taux));
    }
    report->inf_tau = inf_tau;
    report->achieved_C0 = 1.01 * std::max({sup_u + sup_ux, sup_tau + sup_taux,
                                           1.0 / inf_tau});
    // marked-point slopes u_x +- phi_x; for the built-in profiles phi_x = 0
    const int i0 = std::clamp(
        static_cast<int>((profile.x0 - grid.x_min) / dx), 0, n - 1);
    report->slope_fwd = s.A[i0];
    report->slope_bwd = s.B[i0];
    report->phi0 = s.phi[i0];
  }
  return s;
}

double damping_factor(double t1, double t2, const GasParams& g) {
  if (g.alpha == 0.0) return 1.0;
  if (g.lambda == 1.0) return pow_pos((1.0 + t2) / (1.0 + t1), -g.alpha);
  const double oml = 1.0 - g.lambda;
  return std::exp(-g.alpha *
                  (pow_pos(1.0 + t2, oml) - pow_pos(1.0 + t1, oml)) / oml);
}

namespace {

// L(U): conservative Rusanov update with minmod-limited reconstruction
void hyperbolic_rhs(const std::vector<double>& tau, const std::vector<double>& u,
                    const Grid1D& grid, const GasParams& g,
                    std::vector<double>& dtau, std::vector<double>& du) {
  const int n = static_cast<int>(tau.size());
  const double dx = grid.dx();
  const Boundary bc = grid.boundary;

  static thread_local std::vector<double> stau, su, Ftau, Fu;
  stau.resize(n);
  su.resize(n);
  Ftau.resize(n + 1);
  Fu.resize(n + 1);
  for (int i = 0; i < n; ++i) {
    stau[i] = minmod(tau[i] - at(tau, i - 1, bc), at(tau, i + 1, bc) - tau[i]);
    su[i] = minmod(u[i] - at(u, i - 1, bc), at(u, i + 1, bc) - u[i]);
  }
  auto slope = [&](const std::vector<double>& s, int i) {
    return bc == Boundary::periodic ? s[wrap(i, n)] : s[std::clamp(i, 0, n - 1)];
  };
  // face j sits between cells j-1 and j
  for (int j = 0; j <= n; ++j) {
    const double tauL = at(tau, j - 1, bc) + 0.5 * slope(stau, j - 1);
    const double uL = at(u, j - 1, bc) + 0.5 * slope(su, j - 1);
    const double tauR = at(tau, j, bc) - 0.5 * slope(stau, j);
    const double uR = at(u, j, bc) - 0.5 * slope(su, j);
    if (!(tauL > 0.0) || !(tauR > 0.0))
      throw std::runtime_error("hyperbolic_rhs: reconstructed tau <= 0");
    const double smax = std::max(sound_speed(tauL, g), sound_speed(tauR, g));
    Ftau[j] = 0.5 * (-uL - uR) - 0.5 * smax * (tauR - tauL);
    Fu[j] = 0.5 * (pressure(tauL, g) + pressure(tauR, g)) - 0.5 * smax * (uR - uL);
  }
  dtau.resize(n);
  du.resize(n);
  for (int i = 0; i < n; ++i) {
    dtau[i] = -(Ftau[i + 1] - Ftau[i]) / dx;
    du[i] = -(Fu[i + 1] - Fu[i]) / dx;
  }
}

void apply_source(FlowState& s, double t1, double t2, const GasParams& g) {
  const double f = damping_factor(t1, t2, g);
  for (double& v : s.u) v *= f;
}

}  // namespace

void step(FlowState& s, const Grid1D& grid, const GasParams& g, double dt) {
  const double t0 = s.t;
  apply_source(s, t0, t0 + 0.5 * dt, g);

  static thread_local std::vector<double> dtau, du, tau1, u1, dtau1, du1;
  hyperbolic_rhs(s.tau, s.u, grid, g, dtau, du);
  const int n = static_cast<int>(s.tau.size());
  tau1.resize(n);
  u1.resize(n);
  for (int i = 0; i < n; ++i) {
    tau1[i] = s.tau[i] + dt * dtau[i];
    u1[i] = s.u[i] + dt * du[i];
    if (!(tau1[i] > 0.0)) throw std::runtime_error("step: vacuum (tau <= 0)");
  }
  hyperbolic_rhs(tau1, u1, grid, g, dtau1, du1);
  for (int i = 0; i < n; ++i) {
    s.tau[i] = 0.5 * (s.tau[i] + tau1[i] + dt * dtau1[i]);
    s.u[i] = 0.5 * (s.u[i] + u1[i] + dt * du1[i]);
    if (!(s.tau[i] > 0.0)) throw std::runtime_error("step: vacuum (tau <= 0)");
  }
  apply_source(s, t0 + 0.5 * dt, t0 + dt, g);
  s.t = t0 + dt;
  update_derived(s, grid, g);
}

RunResult run(const Grid1D& grid, const Profile& profile, const GasParams& g,
              const RunOptions& opt) {
  RunResult res;
  FlowState s = initialize(grid, profile, g, &res.init);
  res.initial_proxy = gradient_proxy(s);
  const double proxy_ref = std::max(res.initial_proxy, opt.proxy_floor);
  const double Ct0 = g.C_tilde0();
  const double dx = grid.dx();

  double dt0 = opt.cfl * dx / max_sound_speed(s);
  if (opt.fixed_dt) dt0 *= 0.8;
  res.dt_initial = dt0;

  res.snapshots.push_back(s);
  double next_snapshot = opt.snapshot_cadence;
  bool bound_violated = false;
  // with a pinned dt, snapshot on an exact step count so frames are uniform
  const long steps_per_frame =
      (opt.fixed_dt && opt.snapshot_cadence > 0.0)
          ? std::max(1L, std::lround(opt.snapshot_cadence / dt0))
          : 0;
  long step_count = 0;

  while (s.t < opt.horizon) {
    double dt = opt.fixed_dt ? dt0 : opt.cfl * dx / max_sound_speed(s);
    if (opt.fixed_dt && dt0 > opt.cfl * dx / max_sound_speed(s)) {
      res.events.push_back({Event::Type::cfl_violation, s.t,
                            "fixed dt exceeds the CFL limit"});
      res.status = RunResult::Status::aborted;
      break;
    }
    dt = std::min(dt, opt.horizon - s.t);
    if (dt < 1e-14) break;  // horizon reached (or CFL collapse)
    try {
      step(s, grid, g, dt);
    } catch (const std::runtime_error& e) {
      res.events.push_back({Event::Type::vacuum, s.t, e.what()});
      res.status = RunResult::Status::vacuum;
      res.event_time = s.t;
      break;
    }
    if (!bound_violated) {
      for (int i = 0; i < grid.n_cells; ++i) {
        if (std::abs(s.u[i]) > Ct0 || s.tau[i] < 1.0 / Ct0) {
          res.events.push_back({Event::Type::bound_violation, s.t,
                                "a-priori bound exceeded at cell " +
                                    std::to_string(i)});
          bound_violated = true;
          break;
        }
      }
    }
    ++step_count;
    const bool keep_frame =
        steps_per_frame > 0
            ? (step_count % steps_per_frame == 0 || s.t >= opt.horizon - 1e-12)
            : (opt.snapshot_cadence <= 0.0 || s.t >= next_snapshot - 1e-12 ||
               s.t >= opt.horizon - 1e-12);
    if (keep_frame) {
      res.snapshots.push_back(s);
      if (opt.snapshot_cadence > 0.0)
        while (next_snapshot <= s.t + 1e-12)
          next_snapshot += opt.snapshot_cadence;
    }
    const double proxy = gradient_proxy(s);
    if (proxy > opt.blowup_factor * proxy_ref) {
      res.events.push_back({Event::Type::gradient_blowup, s.t,
                            "gradient proxy exceeded " +
                                std::to_string(opt.blowup_factor) +
                                "x its initial value"});
      res.status = RunResult::Status::blew_up;
      res.event_time = s.t;
      if (!keep_frame) res.snapshots.push_back(s);
      if (opt.stop_on_blowup) break;
    }
  }
  if (res.snapshots.back().t < s.t) res.snapshots.push_back(s);
  return res;
}

BlowupConfirmation confirm_blowup_by_refinement(const Grid1D& grid,
                                                const Profile& profile,
                                                const GasParams& g,
                                                const RunOptions& opt) {
  BlowupConfirmation conf;
  const RunResult coarse = run(grid, profile, g, opt);
  if (coarse.status != RunResult::Status::blew_up) return conf;
  conf.candidate = true;
  conf.coarse_time = *coarse.event_time;
  conf.coarse_proxy = gradient_proxy(coarse.snapshots.back());

  Grid1D fine = grid;
  fine.n_cells *= 2;
  RunOptions fopt = opt;
  fopt.horizon = conf.coarse_time;
  fopt.blowup_factor = 1e300;  // run the fine grid all the way to the time
  const RunResult fres = run(fine, profile, g, fopt);
  conf.fine_proxy = gradient_proxy(fres.snapshots.back());
  // a resolved smooth feature gives a ratio near 1; a forming shock
  // well above it even when the coarse grid is only partially saturated
  conf.confirmed = conf.fine_proxy >= 1.5 * conf.coarse_proxy;
  return conf;
}

// ---- characteristic tracing -------------------------------------------

namespace {

double interp_x(const std::vector<double>& v, double x, const Grid1D& grid) {
  const int n = static_cast<int>(v.size());
  const double dx = grid.dx();
  double rel = (x - grid.x_min) / dx - 0.5;
  if (grid.boundary == Boundary::periodic) {
    rel = std::fmod(rel, n);
    if (rel < 0.0) rel += n;
    const int i = static_cast<int>(rel) % n;
    const double f = rel - std::floor(rel);
    return (1.0 - f) * v[i] + f * v[(i + 1) % n];
  }
  if (rel <= 0.0) return v[0];
  if (rel >= n - 1) return v[n - 1];
  const int i = static_cast<int>(rel);
  const double f = rel - i;
  return (1.0 - f) * v[i] + f * v[i + 1];
}

}  // namespace

CharacteristicPath trace_characteristic(const std::vector<FlowState>& snaps,
                                        const Grid1D& grid, const GasParams& g,
                                        CharFamily family, double x_anchor,
                                        int samples_per_interval,
                                        ExponentConvention convention) {
  if (snaps.size() < 2)
    throw std::invalid_argument("trace_characteristic: need >= 2 snapshots");
  if (samples_per_interval < 1)
    throw std::invalid_argument("trace_characteristic: samples_per_interval");
  CharacteristicPath path;
  path.family = family;
  path.x_anchor = x_anchor;
  path.t_anchor = snaps.front().t;
  const double sgn = family == CharFamily::forward ? 1.0 : -1.0;

  auto field_at = [&](auto member, double t, double x, std::size_t k) {
    const FlowState& a = snaps[k];
    const FlowState& b = snaps[k + 1];
    const double th = (t - a.t) / (b.t - a.t);
    return (1.0 - th) * interp_x(a.*member, x, grid) +
           th * interp_x(b.*member, x, grid);
  };

  double x = x_anchor;
  for (std::size_t k = 0; k + 1 < snaps.size(); ++k) {
    const double t_a = snaps[k].t, t_b = snaps[k + 1].t;
    const double h = (t_b - t_a) / samples_per_interval;
    for (int m = 0; m < samples_per_interval; ++m) {
      const double t = t_a + m * h;
      PathSample ps;
      ps.t = t;
      ps.x = x;
      ps.tau = field_at(&FlowState::tau, t, x, k);
      ps.u = field_at(&FlowState::u, t, x, k);
      ps.phi = phi_of_tau(ps.tau, g);
      ps.A = field_at(&FlowState::A, t, x, k);
      ps.B = field_at(&FlowState::B, t, x, k);
      const double grad = family == CharFamily::forward ? ps.A : ps.B;
      ps.value = gradient_variable(t, ps.phi, grad, g, convention);
      path.samples.push_back(ps);
      // midpoint rule on dx/dt = +-c
      const double c1 = sgn * sound_speed(ps.tau, g);
      const double xm = x + 0.5 * h * c1;
      const double tau_m = field_at(&FlowState::tau, t + 0.5 * h, xm, k);
      x += h * sgn * sound_speed(tau_m, g);
      if (grid.boundary == Boundary::constant_extrapolation &&
          (x <= grid.x_min || x >= grid.x_max)) {
        path.left_domain = true;
        return path;
      }
    }
  }
  // final sample at the last snapshot time
  const std::size_t k = snaps.size() - 2;
  const double t = snaps.back().t;
  PathSample ps;
  ps.t = t;
  ps.x = x;
  ps.tau = field_at(&FlowState::tau, t, x, k);
  ps.u = field_at(&FlowState::u, t, x, k);
  ps.phi = phi_of_tau(ps.tau, g);
  ps.A = field_at(&FlowState::A, t, x, k);
  ps.B = field_at(&FlowState::B, t, x, k);
  const double grad = family == CharFamily::forward ? ps.A : ps.B;
  ps.value = gradient_variable(t, ps.phi, grad, g, convention);
  path.samples.push_back(ps);
  return path;
}

std::string event_type_name(Event::Type t) {
  switch (t) {
    case Event::Type::gradient_blowup: return "gradient_blowup";
    case Event::Type::vacuum: return "vacuum";
    case Event::Type::bound_violation: return "bound_violation";
    case Event::Type::cfl_violation: return "cfl_violation";
  }
  return "unknown";
}

}  // namespace dampflow
