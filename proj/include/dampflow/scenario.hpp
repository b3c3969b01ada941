#ifndef DAMPFLOW_SCENARIO_HPP
#define DAMPFLOW_SCENARIO_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dampflow/solver.hpp"
#include "dampflow/verifier.hpp"

namespace dampflow {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  std::string name = "scenario";
  GasParams params{2.0, 1.0, 0.0, 0.0, 2.0};
  Grid1D grid;
  Profile profile;
  double horizon = 1.0;
  double snapshot_cadence = 0.1;
  long seed = 0;
  std::optional<double> t0_budget;  // gamma = 3 blow-up budget
  bool fixed_dt = false;            // uniform frames for path residuals

  // Throws config_error listing every violated constraint.
  void validate() const;
};

nlohmann::json to_json(const ScenarioConfig& c);
ScenarioConfig config_from_json(const nlohmann::json& j);
ScenarioConfig parse_config(const std::string& path);

// FNV-1a 64-bit hash of the canonical (sorted-key) JSON dump.
std::string scenario_hash(const ScenarioConfig& c);

// Shortest representation that round-trips exactly.
std::string format_double(double v);

void write_snapshot_csv(const std::string& path, const FlowState& s,
                        const Grid1D& grid);
// Reloads (t, tau, u) and recomputes the derived fields.
FlowState read_snapshot_csv(const std::string& path, const Grid1D& grid,
                            const GasParams& g, double t);

nlohmann::json bounds_to_json(const BoundsContext& b,
                              std::optional<double> t0_budget = std::nullopt);
nlohmann::json verdict_to_json(const BoundReport& rep);

// Writes config.json, manifest.json and snapshots/frame_NNNNNN.csv under dir.
// Returns the manifest document.
nlohmann::json write_run_artifacts(const std::string& dir,
                                   const ScenarioConfig& cfg,
                                   const RunResult& run);

struct LoadedRun {
  ScenarioConfig config;
  RunResult run;
  double M = 0.0;  // control-function ceiling recomputed from frame 0
};
LoadedRun load_run(const std::string& dir);

// Simulate + write artifacts + verify + write verdict.json; returns the
// report. The caller maps it to an exit status.
BoundReport execute_scenario(const ScenarioConfig& cfg, const std::string& dir);

}  // namespace dampflow

#endif
