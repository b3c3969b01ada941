#include "dampflow/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace dampflow {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- validation --------------------------------------------------------

void ScenarioConfig::validate() const {
  std::vector<std::string> bad;
  if (!(params.gamma > 1.0)) bad.push_back("params.gamma must be > 1");
  if (!(params.K > 0.0)) bad.push_back("params.K must be > 0");
  if (!(params.alpha >= 0.0)) bad.push_back("params.alpha must be >= 0");
  if (!std::isfinite(params.lambda)) bad.push_back("params.lambda must be finite");
  if (!(params.C0 > 0.0)) bad.push_back("params.C0 must be > 0");
  if (!(grid.x_max > grid.x_min)) bad.push_back("grid.x_max must exceed grid.x_min");
  if (grid.n_cells < 16) bad.push_back("grid.n_cells must be >= 16");
  if (!(profile.tau_bar > 0.0)) bad.push_back("profile.tau_bar must be > 0");
  if (profile.kind == Profile::Kind::sine && profile.wavenumber < 1)
    bad.push_back("profile.wavenumber must be >= 1");
  if (profile.kind == Profile::Kind::compression_pulse) {
    if (!(profile.width > 0.0)) bad.push_back("profile.width must be > 0");
    if (!(profile.x0 > grid.x_min && profile.x0 < grid.x_max))
      bad.push_back("profile.x0 must lie inside the grid");
  }
  if (!(horizon > 0.0)) bad.push_back("horizon must be > 0");
  if (!(snapshot_cadence > 0.0)) bad.push_back("snapshot_cadence must be > 0");
  if (t0_budget && !(*t0_budget > 0.0)) bad.push_back("t0_budget must be > 0");
  if (!bad.empty()) {
    std::string msg = "invalid scenario config:";
    for (const auto& b : bad) msg += "\n  - " + b;
    throw config_error(msg);
  }
}

// ---- JSON <-> config ---------------------------------------------------

namespace {

void reject_unknown(const json& j, const char* where,
                    std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) { ok = true; break; }
    if (!ok)
      throw config_error(std::string("unknown key '") + it.key() + "' in " +
                         where);
  }
}

double need_num(const json& j, const char* key, const char* where) {
  if (!j.contains(key))
    throw config_error(std::string("missing key '") + key + "' in " + where);
  if (!j.at(key).is_number())
    throw config_error(std::string("key '") + key + "' in " + where +
                       " must be a number");
  return j.at(key).get<double>();
}

double opt_num(const json& j, const char* key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

}  // namespace

json to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["params"] = {{"gamma", c.params.gamma}, {"K", c.params.K},
                 {"alpha", c.params.alpha}, {"lambda", c.params.lambda},
                 {"C0", c.params.C0}};
  j["grid"] = {{"x_min", c.grid.x_min},
               {"x_max", c.grid.x_max},
               {"n_cells", c.grid.n_cells},
               {"boundary", c.grid.boundary == Boundary::periodic
                                ? "periodic"
                                : "constant_extrapolation"}};
  json p;
  switch (c.profile.kind) {
    case Profile::Kind::constant:
      p = {{"kind", "constant"}, {"tau", c.profile.tau_bar},
           {"u", c.profile.u_mean}};
      break;
    case Profile::Kind::sine:
      p = {{"kind", "sine"}, {"tau_bar", c.profile.tau_bar},
           {"u_amp", c.profile.u_amp}, {"wavenumber", c.profile.wavenumber}};
      break;
    case Profile::Kind::compression_pulse:
      p = {{"kind", "compression_pulse"}, {"tau_bar", c.profile.tau_bar},
           {"slope", c.profile.slope}, {"width", c.profile.width},
           {"x0", c.profile.x0}};
      break;
  }
  j["profile"] = p;
  j["horizon"] = c.horizon;
  j["snapshot_cadence"] = c.snapshot_cadence;
  j["seed"] = c.seed;
  if (c.t0_budget) j["t0_budget"] = *c.t0_budget;
  j["fixed_dt"] = c.fixed_dt;
  return j;
}

ScenarioConfig config_from_json(const json& j) {
  if (!j.is_object()) throw config_error("config root must be a JSON object");
  reject_unknown(j, "config",
                 {"name", "params", "grid", "profile", "horizon",
                  "snapshot_cadence", "seed", "t0_budget", "fixed_dt"});
  ScenarioConfig c;
  if (j.contains("name")) c.name = j.at("name").get<std::string>();

  if (!j.contains("params")) throw config_error("missing 'params' object");
  const json& pj = j.at("params");
  reject_unknown(pj, "params", {"gamma", "K", "alpha", "lambda", "C0"});
  c.params.gamma = need_num(pj, "gamma", "params");
  c.params.K = need_num(pj, "K", "params");
  c.params.alpha = opt_num(pj, "alpha", 0.0);
  c.params.lambda = opt_num(pj, "lambda", 0.0);
  c.params.C0 = need_num(pj, "C0", "params");

  if (j.contains("grid")) {
    const json& gj = j.at("grid");
    reject_unknown(gj, "grid", {"x_min", "x_max", "n_cells", "boundary"});
    c.grid.x_min = opt_num(gj, "x_min", 0.0);
    c.grid.x_max = opt_num(gj, "x_max", 1.0);
    c.grid.n_cells = static_cast<int>(opt_num(gj, "n_cells", 256));
    if (gj.contains("boundary")) {
      const std::string b = gj.at("boundary").get<std::string>();
      if (b == "periodic")
        c.grid.boundary = Boundary::periodic;
      else if (b == "constant_extrapolation")
        c.grid.boundary = Boundary::constant_extrapolation;
      else
        throw config_error("grid.boundary must be 'periodic' or "
                           "'constant_extrapolation'");
    }
  }

  if (!j.contains("profile")) throw config_error("missing 'profile' object");
  const json& fj = j.at("profile");
  if (!fj.contains("kind")) throw config_error("missing 'profile.kind'");
  const std::string kind = fj.at("kind").get<std::string>();
  if (kind == "constant") {
    reject_unknown(fj, "profile", {"kind", "tau", "u"});
    c.profile.kind = Profile::Kind::constant;
    c.profile.tau_bar = opt_num(fj, "tau", 1.0);
    c.profile.u_mean = opt_num(fj, "u", 0.0);
  } else if (kind == "sine") {
    reject_unknown(fj, "profile", {"kind", "tau_bar", "u_amp", "wavenumber"});
    c.profile.kind = Profile::Kind::sine;
    c.profile.tau_bar = opt_num(fj, "tau_bar", 1.0);
    c.profile.u_amp = need_num(fj, "u_amp", "profile");
    c.profile.wavenumber = static_cast<int>(opt_num(fj, "wavenumber", 1));
  } else if (kind == "compression_pulse") {
    reject_unknown(fj, "profile", {"kind", "tau_bar", "slope", "width", "x0"});
    c.profile.kind = Profile::Kind::compression_pulse;
    c.profile.tau_bar = opt_num(fj, "tau_bar", 1.0);
    c.profile.slope = need_num(fj, "slope", "profile");
    c.profile.width = opt_num(fj, "width", 0.25);
    c.profile.x0 = opt_num(fj, "x0", 0.0);
  } else {
    throw config_error("profile.kind must be 'constant', 'sine' or "
                       "'compression_pulse'");
  }

  c.horizon = opt_num(j, "horizon", 1.0);
  c.snapshot_cadence = opt_num(j, "snapshot_cadence", 0.1);
  if (j.contains("seed")) c.seed = j.at("seed").get<long>();
  if (j.contains("t0_budget")) c.t0_budget = j.at("t0_budget").get<double>();
  if (j.contains("fixed_dt")) c.fixed_dt = j.at("fixed_dt").get<bool>();

  c.validate();
  return c;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config parse error: ") + e.what());
  }
  return config_from_json(j);
}

std::string scenario_hash(const ScenarioConfig& c) {
  const std::string canon = to_json(c).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---- serialization helpers --------------------------------------------

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_snapshot_csv(const std::string& path, const FlowState& s,
                        const Grid1D& grid) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "x,tau,u,rho,p,c,phi,w,z,A,B\n";
  for (int i = 0; i < grid.n_cells; ++i) {
    out << format_double(grid.x_center(i)) << ',' << format_double(s.tau[i])
        << ',' << format_double(s.u[i]) << ',' << format_double(s.rho[i])
        << ',' << format_double(s.p[i]) << ',' << format_double(s.c[i]) << ','
        << format_double(s.phi[i]) << ',' << format_double(s.w[i]) << ','
        << format_double(s.z[i]) << ',' << format_double(s.A[i]) << ','
        << format_double(s.B[i]) << '\n';
  }
}

FlowState read_snapshot_csv(const std::string& path, const Grid1D& grid,
                            const GasParams& g, double t) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(in, line);  // header
  FlowState s;
  s.t = t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() < 3)
      throw std::runtime_error("malformed snapshot row in " + path);
    s.tau.push_back(vals[1]);
    s.u.push_back(vals[2]);
  }
  if (static_cast<int>(s.tau.size()) != grid.n_cells)
    throw std::runtime_error("snapshot size mismatch in " + path);
  update_derived(s, grid, g);
  return s;
}

json bounds_to_json(const BoundsContext& b, std::optional<double> t0_budget) {
  const GasParams& g = b.params;
  json j;
  j["M"] = b.M;
  j["C"] = b.C;
  j["M_hat"] = b.M_hat;
  j["t0"] = b.t0 ? json(*b.t0) : json(nullptr);
  if (!g.is_gamma3() && g.lambda != 1.0) {
    j["K3"] = g.alpha * (g.gamma - 1.0) / (g.K_c() * (g.gamma - 3.0));
    const double efac = std::exp(-g.alpha * (3.0 * g.gamma - 1.0) /
                                 (2.0 * (g.gamma - 3.0) * (1.0 - g.lambda)));
    j["K4"] = b.N1 * efac;
    j["N1"] = b.N1;
  } else {
    j["K3"] = json(nullptr);
    j["K4"] = json(nullptr);
    j["N1"] = json(nullptr);
  }
  j["N2"] = b.N2;
  j["N3"] = b.N3;
  j["N1_tilde"] = b.Nt1;
  j["N3_tilde"] = b.Nt3;
  j["N1_tilde_divergent"] = b.Nt1_divergent;
  j["K3_tilde"] = b.Kt3;
  j["K4_tilde"] = b.Kt4;
  j["K5_tilde"] = b.Kt5;
  j["K6_tilde"] = b.Kt6;
  j["K5_hat"] = b.Kh5;
  j["K6_hat"] = b.Kh6;
  if (g.is_gamma3() && t0_budget) {
    j["M_bar"] = m_bar(*t0_budget, g, b.M);
    j["M_tilde"] = m_tilde(*t0_budget, g, b.M);
  } else {
    j["M_bar"] = json(nullptr);
    j["M_tilde"] = json(nullptr);
  }
  return j;
}

json verdict_to_json(const BoundReport& rep) {
  json j;
  j["run_id"] = rep.run_id;
  json checks = json::array();
  for (const auto& c : rep.checks) {
    json cj;
    cj["name"] = c.name;
    cj["status"] = check_status_name(c.status);
    cj["worst_margin"] = c.worst_margin;
    cj["worst_x"] = c.worst_x;
    cj["worst_t"] = c.worst_t;
    if (!c.note.empty()) cj["note"] = c.note;
    checks.push_back(cj);
  }
  j["checks"] = checks;
  if (rep.residuals) {
    j["residuals"] = {{"rms", rep.residuals->rms},
                      {"max", rep.residuals->max},
                      {"n_samples", rep.residuals->n_samples}};
  }
  if (rep.blowup) {
    const auto& b = *rep.blowup;
    j["blowup_comparison"] = {
        {"threshold", b.threshold},
        {"measured_slope", b.measured_slope},
        {"threshold_crossed", b.threshold_crossed},
        {"numerical_event_time",
         b.numerical_event_time ? json(*b.numerical_event_time) : json(nullptr)},
        {"analytic_upper_bound",
         b.analytic_upper_bound ? json(*b.analytic_upper_bound) : json(nullptr)},
        {"consistent", b.consistent}};
  }
  j["pass"] = rep.all_applicable_pass();
  return j;
}

// ---- run artifacts -----------------------------------------------------

namespace {

std::string status_name(RunResult::Status s) {
  switch (s) {
    case RunResult::Status::completed: return "completed";
    case RunResult::Status::blew_up: return "blew_up";
    case RunResult::Status::vacuum: return "vacuum";
    case RunResult::Status::aborted: return "aborted";
  }
  return "unknown";
}

RunResult::Status status_from_name(const std::string& s) {
  if (s == "completed") return RunResult::Status::completed;
  if (s == "blew_up") return RunResult::Status::blew_up;
  if (s == "vacuum") return RunResult::Status::vacuum;
  return RunResult::Status::aborted;
}

Event::Type event_type_from_name(const std::string& s) {
  if (s == "gradient_blowup") return Event::Type::gradient_blowup;
  if (s == "vacuum") return Event::Type::vacuum;
  if (s == "bound_violation") return Event::Type::bound_violation;
  return Event::Type::cfl_violation;
}

double frame_M(const FlowState& s, const GasParams& g) {
  return ceiling_M(s.tau, s.A, s.B, g);
}

}  // namespace

json write_run_artifacts(const std::string& dir, const ScenarioConfig& cfg,
                         const RunResult& run) {
  fs::create_directories(fs::path(dir) / "snapshots");
  {
    std::ofstream out(fs::path(dir) / "config.json");
    out << to_json(cfg).dump(2) << '\n';
  }
  json frames = json::array();
  int idx = 0;
  for (const auto& s : run.snapshots) {
    char name[40];
    std::snprintf(name, sizeof name, "snapshots/frame_%06d.csv", idx++);
    write_snapshot_csv((fs::path(dir) / name).string(), s, cfg.grid);
    frames.push_back({{"t", s.t}, {"file", name}});
  }
  const double M =
      run.snapshots.empty() ? 0.0 : frame_M(run.snapshots.front(), cfg.params);

  json man;
  man["scenario_hash"] = scenario_hash(cfg);
  man["status"] = status_name(run.status);
  json events = json::array();
  for (const auto& e : run.events)
    events.push_back({{"type", event_type_name(e.type)},
                      {"time", e.time},
                      {"message", e.message}});
  man["events"] = events;
  man["event_time"] = run.event_time ? json(*run.event_time) : json(nullptr);
  man["init"] = {{"achieved_C0", run.init.achieved_C0},
                 {"inf_tau", run.init.inf_tau},
                 {"slope_fwd", run.init.slope_fwd},
                 {"slope_bwd", run.init.slope_bwd},
                 {"phi0", run.init.phi0}};
  man["dt_initial"] = run.dt_initial;
  man["initial_proxy"] = run.initial_proxy;
  man["constants"] = bounds_to_json(make_bounds_context(cfg.params, M),
                                    cfg.t0_budget);
  man["snapshots"] = frames;
  man["verdict_path"] = "verdict.json";
  {
    std::ofstream out(fs::path(dir) / "manifest.json");
    out << man.dump(2) << '\n';
  }
  return man;
}

LoadedRun load_run(const std::string& dir) {
  LoadedRun lr;
  lr.config = parse_config((fs::path(dir) / "config.json").string());
  std::ifstream min(fs::path(dir) / "manifest.json");
  if (!min) throw config_error("cannot open manifest.json in " + dir);
  json man = json::parse(min);

  lr.run.status = status_from_name(man.at("status").get<std::string>());
  for (const auto& e : man.at("events")) {
    lr.run.events.push_back(
        {event_type_from_name(e.at("type").get<std::string>()),
         e.at("time").get<double>(), e.at("message").get<std::string>()});
  }
  if (!man.at("event_time").is_null())
    lr.run.event_time = man.at("event_time").get<double>();
  const json& init = man.at("init");
  lr.run.init.achieved_C0 = init.at("achieved_C0").get<double>();
  lr.run.init.inf_tau = init.at("inf_tau").get<double>();
  lr.run.init.slope_fwd = init.at("slope_fwd").get<double>();
  lr.run.init.slope_bwd = init.at("slope_bwd").get<double>();
  lr.run.init.phi0 = init.at("phi0").get<double>();
  lr.run.dt_initial = man.at("dt_initial").get<double>();
  lr.run.initial_proxy = man.at("initial_proxy").get<double>();

  for (const auto& f : man.at("snapshots")) {
    lr.run.snapshots.push_back(read_snapshot_csv(
        (fs::path(dir) / f.at("file").get<std::string>()).string(),
        lr.config.grid, lr.config.params, f.at("t").get<double>()));
  }
  if (!lr.run.snapshots.empty())
    lr.M = frame_M(lr.run.snapshots.front(), lr.config.params);
  return lr;
}

BoundReport execute_scenario(const ScenarioConfig& cfg,
                             const std::string& dir) {
  cfg.validate();
  RunOptions opt;
  opt.horizon = cfg.horizon;
  opt.fixed_dt = cfg.fixed_dt;
  opt.snapshot_cadence = cfg.snapshot_cadence;
  RunResult run = ::dampflow::run(cfg.grid, cfg.profile, cfg.params, opt);
  write_run_artifacts(dir, cfg, run);
  const double M =
      run.snapshots.empty() ? 0.0 : frame_M(run.snapshots.front(), cfg.params);
  BoundReport rep =
      verify_run(run, cfg.grid, cfg.params, M, cfg.t0_budget);
  rep.run_id = scenario_hash(cfg);
  {
    std::ofstream out(fs::path(dir) / "verdict.json");
    out << verdict_to_json(rep).dump(2) << '\n';
  }
  return rep;
}

}  // namespace dampflow
