#ifndef DAMPFLOW_SOLVER_HPP
#define DAMPFLOW_SOLVER_HPP

#include <optional>
#include <string>
#include <vector>

#include "dampflow/coeff_lab.hpp"
#include "dampflow/gas_model.hpp"

namespace dampflow {

enum class Boundary { periodic, constant_extrapolation };

struct Grid1D {
  double x_min = 0.0;
  double x_max = 1.0;
  int n_cells = 256;
  Boundary boundary = Boundary::periodic;

  void validate() const;
  double dx() const { return (x_max - x_min) / n_cells; }
  double x_center(int i) const { return x_min + (i + 0.5) * dx(); }
};

// Built-in initial profile families.
struct Profile {
  enum class Kind { constant, sine, compression_pulse };
  Kind kind = Kind::constant;
  double tau_bar = 1.0;
  double u_mean = 0.0;    // constant
  double u_amp = 0.0;     // sine amplitude
  int wavenumber = 1;     // sine cycles over the domain
  double slope = 0.0;     // pulse: u_x at x0
  double width = 0.25;    // pulse width
  double x0 = 0.0;        // pulse center / marked point

  double tau_at(double x) const;
  double u_at(double x) const;
  void validate() const;
};

// Cell-centered fields plus everything derived from (tau, u).
struct FlowState {
  double t = 0.0;
  std::vector<double> tau, u;
  std::vector<double> rho, p, c, phi, w, z;
  std::vector<double> A, B;  // w_x, z_x by central differences
};

void update_derived(FlowState& s, const Grid1D& grid, const GasParams& g);
double gradient_proxy(const FlowState& s);
double max_sound_speed(const FlowState& s);
double total_tau(const FlowState& s, const Grid1D& grid);

struct InitReport {
  double achieved_C0 = 0.0;  // max of the C^1 sup norms and 1/inf tau
  double inf_tau = 0.0;
  double slope_fwd = 0.0;    // u_x + phi_x at the marked point
  double slope_bwd = 0.0;    // u_x - phi_x at the marked point
  double phi0 = 0.0;         // phi at the marked point
};

FlowState initialize(const Grid1D& grid, const Profile& profile,
                     const GasParams& g, InitReport* report = nullptr);

// Exact damping factor of u' = -alpha (1+t)^{-lambda} u over [t1, t2].
double damping_factor(double t1, double t2, const GasParams& g);

// One Strang-split step: half source, full Rusanov/minmod hyperbolic update
// (SSP RK2), half source. Derived fields are refreshed.
void step(FlowState& s, const Grid1D& grid, const GasParams& g, double dt);

struct Event {
  enum class Type { gradient_blowup, vacuum, bound_violation, cfl_violation };
  Type type;
  double time;
  std::string message;
};
std::string event_type_name(Event::Type t);

struct RunOptions {
  double horizon = 1.0;
  double cfl = 0.45;
  bool fixed_dt = false;           // pin dt at its t=0 value (uniform frames)
  double snapshot_cadence = 0.0;   // 0 = keep every step
  double blowup_factor = 50.0;
  double proxy_floor = 1e-6;       // reference floor for degenerate data
  bool stop_on_blowup = true;
};

struct RunResult {
  enum class Status { completed, blew_up, vacuum, aborted };
  Status status = Status::completed;
  std::vector<FlowState> snapshots;
  std::vector<Event> events;
  std::optional<double> event_time;
  InitReport init;
  double dt_initial = 0.0;
  double initial_proxy = 0.0;
};

RunResult run(const Grid1D& grid, const Profile& profile, const GasParams& g,
              const RunOptions& opt);

// Gradient-catastrophe guard: rerun on a 2x grid up to the candidate event
// time and require the proxy to grow by at least 1.5x.
struct BlowupConfirmation {
  bool candidate = false;
  bool confirmed = false;
  double coarse_time = 0.0;
  double coarse_proxy = 0.0;
  double fine_proxy = 0.0;
};
BlowupConfirmation confirm_blowup_by_refinement(const Grid1D& grid,
                                                const Profile& profile,
                                                const GasParams& g,
                                                const RunOptions& opt);

// ---- characteristic tracing -------------------------------------------

enum class CharFamily { forward, backward };

struct PathSample {
  double t, x;
  double tau, u, phi;
  double A, B;     // interpolated gradients
  double value;    // y / q / y1 / q1 at this point
};

struct CharacteristicPath {
  CharFamily family;
  double x_anchor = 0.0;
  double t_anchor = 0.0;
  bool left_domain = false;
  std::vector<PathSample> samples;
};

// Integrate dx/dt = +-c through the stored snapshot slab with linear
// interpolation in x and t; attach the gradient variable of the matching
// family using the given exponent convention.
CharacteristicPath trace_characteristic(
    const std::vector<FlowState>& snapshots, const Grid1D& grid,
    const GasParams& g, CharFamily family, double x_anchor,
    int samples_per_interval = 20,
    ExponentConvention convention = ExponentConvention::one_minus_lambda);

}  // namespace dampflow

#endif
