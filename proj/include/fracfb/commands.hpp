// CLI entry points: solve, validate-kernel, diagnose, sweep-epsilon.
// Exit contract: 0 converged/passed, 2 flagged, 1 error.
#pragma once

#include <string>

#include "fracfb/config.hpp"
#include "fracfb/report.hpp"

namespace fracfb {

int cmd_solve(const ScenarioConfig& config);
int cmd_validate_kernel(const ScenarioConfig& config);
int cmd_diagnose(const ScenarioConfig& config, const std::string& field_csv_path);
int cmd_sweep_epsilon(const ScenarioConfig& config);

// Output directory after the FRACFB_OUT_DIR environment override.
std::string resolve_output_dir(const ScenarioConfig& config);

// Diagnostic sections appended to a metrics report (shared by solve and
// diagnose). Returns the per-boundary-point CSV dump.
std::string append_diagnostics(Report& report, const Scenario& scenario,
                               const ScalarField& u, const ScenarioConfig& config);

} // namespace fracfb
