#ifndef DAMPFLOW_VERIFIER_HPP
#define DAMPFLOW_VERIFIER_HPP

#include <optional>
#include <string>
#include <vector>

#include "dampflow/coeff_lab.hpp"
#include "dampflow/riccati.hpp"
#include "dampflow/solver.hpp"

namespace dampflow {

enum class CheckStatus { pass, fail, not_applicable };
std::string check_status_name(CheckStatus s);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::not_applicable;
  double worst_margin = 0.0;   // smallest slack seen; negative on failure
  double worst_x = 0.0;
  double worst_t = 0.0;
  std::string note;
};

struct ResidualStats {
  double rms = 0.0;
  double max = 0.0;
  std::size_t n_samples = 0;
};

struct BlowupComparison {
  bool threshold_crossed = false;
  double measured_slope = 0.0;
  double threshold = 0.0;
  std::optional<double> numerical_event_time;
  std::optional<double> analytic_upper_bound;
  bool consistent = true;  // event_time <= 1.2 * bound whenever asserted
};

struct BoundReport {
  std::string run_id;
  std::vector<CheckResult> checks;
  std::optional<ResidualStats> residuals;
  std::optional<BlowupComparison> blowup;
  bool all_applicable_pass() const;
};

// A-priori bounds: |u| <= C~0 and tau >= C~0^{-1} on every classical snapshot.
CheckResult check_apriori(const std::vector<FlowState>& snaps,
                          const Grid1D& grid, const GasParams& g);

// rho >= density_floor(t); not-applicable for gamma > 3.
CheckResult check_density_floor(const std::vector<FlowState>& snaps,
                                const Grid1D& grid, const GasParams& g,
                                double M);

// G, H (or G^, H^ for lambda < 0) stay below their ceilings.
CheckResult check_GH_ceiling(const std::vector<FlowState>& snaps,
                             const Grid1D& grid, const GasParams& g, double M);

// Centered 4th-order dy/dt along the path against the Riccati right side.
ResidualStats riccati_residual(const CharacteristicPath& path,
                               const CoefficientSet& coeffs);

// Threshold-vs-outcome confrontation for one run.
BlowupComparison blowup_confrontation(const RunResult& run, const GasParams& g,
                                      const BoundsContext& bounds,
                                      std::optional<double> t0_budget);

// Full report over a finished run.
BoundReport verify_run(const RunResult& run, const Grid1D& grid,
                       const GasParams& g, double M,
                       std::optional<double> t0_budget);

}  // namespace dampflow

#endif
