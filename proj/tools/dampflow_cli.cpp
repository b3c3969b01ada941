#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "dampflow/riccati.hpp"
#include "dampflow/scenario.hpp"
#include "dampflow/suite.hpp"

namespace fs = std::filesystem;
using namespace dampflow;

namespace {

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  ScenarioConfig cfg = parse_config(config_path);
  BoundReport rep = execute_scenario(cfg, out_dir);
  std::cout << verdict_to_json(rep).dump(2) << '\n';
  return rep.all_applicable_pass() ? 0 : 1;
}

int cmd_bounds(const std::string& config_path) {
  ScenarioConfig cfg = parse_config(config_path);
  InitReport init;
  FlowState s0 = initialize(cfg.grid, cfg.profile, cfg.params, &init);
  const double M = ceiling_M(s0.tau, s0.A, s0.B, cfg.params);
  BoundsContext b = make_bounds_context(cfg.params, M);
  nlohmann::json j = bounds_to_json(b, cfg.t0_budget);
  j["scenario_hash"] = scenario_hash(cfg);
  j["phi0"] = init.phi0;
  try {
    j["threshold"] = blowup_threshold(init.phi0, cfg.params, b, cfg.t0_budget);
  } catch (const unsupported_regime&) {
    j["threshold"] = nullptr;
  } catch (const std::invalid_argument&) {
    j["threshold"] = nullptr;
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_riccati(const std::string& config_path, const std::string& out_path,
                double y0, double horizon) {
  ScenarioConfig cfg = parse_config(config_path);
  CoefficientSet coeffs = riccati_coefficients(cfg.params);
  InitReport init;
  initialize(cfg.grid, cfg.profile, cfg.params, &init);
  const double phi0 = init.phi0;
  RiccatiTrajectory traj = integrate_riccati(
      coeffs, [phi0](double) { return phi0; }, y0, horizon,
      cfg.params.is_gamma3() ? RiccatiVariable::y1 : RiccatiVariable::y);

  if (!out_path.empty()) {
    std::ofstream csv(out_path);
    csv << "t,value\n";
    for (const auto& [t, v] : traj.samples)
      csv << format_double(t) << ',' << format_double(v) << '\n';
  }
  nlohmann::json j;
  j["variable"] = cfg.params.is_gamma3() ? "y1" : "y";
  j["status"] = traj.status == TrajectoryStatus::blew_up ? "blew_up"
                                                         : "alive_at_horizon";
  j["blowup_time"] =
      traj.blowup_time ? nlohmann::json(*traj.blowup_time) : nullptr;
  if (traj.blowup_bracket)
    j["blowup_bracket"] = {traj.blowup_bracket->first,
                           traj.blowup_bracket->second};
  j["n_samples"] = traj.samples.size();
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_verify(const std::string& run_dir) {
  LoadedRun lr = load_run(run_dir);
  BoundReport rep = verify_run(lr.run, lr.config.grid, lr.config.params, lr.M,
                               lr.config.t0_budget);
  rep.run_id = scenario_hash(lr.config);
  {
    std::ofstream out(fs::path(run_dir) / "verdict.json");
    out << verdict_to_json(rep).dump(2) << '\n';
  }
  std::cout << verdict_to_json(rep).dump(2) << '\n';
  return rep.all_applicable_pass() ? 0 : 1;
}

int cmd_suite(const std::string& name, const std::string& out_dir,
              int workers) {
  SuiteOutcome outc = run_suite(name, out_dir, workers);
  std::cout << outc.summary;
  return outc.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for 1D damped Lagrangian gas flow"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", run_dir, suite_name, riccati_csv;
  double y0 = -1.0, horizon = 5.0;
  int workers = 0;

  auto* sim = app.add_subcommand("simulate", "run one scenario");
  sim->add_option("--config", config_path)->required();
  sim->add_option("--out", out_dir);

  auto* bnd = app.add_subcommand("bounds", "print resolved constants");
  bnd->add_option("--config", config_path)->required();

  auto* ric = app.add_subcommand("riccati", "integrate the gradient ODE");
  ric->add_option("--config", config_path)->required();
  ric->add_option("--out", riccati_csv);
  ric->add_option("--y0", y0);
  ric->add_option("--horizon", horizon);

  auto* ver = app.add_subcommand("verify", "re-check a stored run");
  ver->add_option("--run", run_dir)->required();

  auto* sui = app.add_subcommand("suite", "run a named scenario suite");
  sui->add_option("name", suite_name)->required();
  sui->add_option("--out", out_dir);
  sui->add_option("--workers", workers);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out_dir);
    if (bnd->parsed()) return cmd_bounds(config_path);
    if (ric->parsed()) return cmd_riccati(config_path, riccati_csv, y0, horizon);
    if (ver->parsed()) return cmd_verify(run_dir);
    if (sui->parsed()) return cmd_suite(suite_name, out_dir, workers);
  } catch (const config_error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const unsupported_regime& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
