#ifndef DAMPFLOW_SUITE_HPP
#define DAMPFLOW_SUITE_HPP

#include <string>
#include <vector>

#include "dampflow/scenario.hpp"

namespace dampflow {

// Named scenario collections, one per parameter regime.
std::vector<std::string> suite_names();
std::vector<ScenarioConfig> suite_scenarios(const std::string& suite_name);

struct SuiteOutcome {
  int exit_code = 0;     // 0 pass, 1 check failure, 3 numerical abort
  std::string summary;   // one line per scenario
};

// Executes the suite under out_dir/<scenario-name>/, up to `workers`
// scenarios at a time (0 = pick from hardware or DAMPFLOW_WORKERS).
SuiteOutcome run_suite(const std::string& suite_name,
                       const std::string& out_dir, int workers = 0);

}  // namespace dampflow

#endif
