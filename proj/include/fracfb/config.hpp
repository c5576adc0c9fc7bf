// Scenario configuration: flat key-value text with dotted sections.
//
// Grammar: one `key = value` per line; `#` starts a comment; keys are
// dotted lowercase words; values are numbers, words, or space-separated
// number lists. Unknown keys and constraint violations are reported all
// at once with line numbers.
#pragma once

#include <string>
#include <vector>

#include "fracfb/grid.hpp"
#include "fracfb/solver.hpp"

namespace fracfb {

struct ScenarioConfig {
    int dimension = 1;
    double half_width = 2.5;
    int points = 401;

    DomainSpec domain;
    ObstacleSpec obstacle;

    double alpha = 0.5;
    double gamma = 1.0;
    double tau_pos = 0.0; // 0 means default 1e-8 * amplitude
    bool allow_zero_gamma = false;
    double c_norm_scale = 1.0; // fault-injection hook for kernel validation

    ContinuationSchedule schedule;
    double grad_tol = 1e-6;
    long max_iters = 20000;
    bool clamp_safeguard = true;
    double vol_tol = 0.05;

    bool diagnostics_enabled = true;
    int holder_stride = 1;
    double harnack_shrink = 0.25;

    std::string output_dir = "out";
    long seed = 1;
};

struct ConfigError {
    int line = 0; // 0 when not tied to a line
    std::string field;
    std::string message;
};

struct ParseResult {
    ScenarioConfig config;
    std::vector<ConfigError> errors;
    bool ok() const { return errors.empty(); }
    std::string describe() const;
};

ParseResult parse_config(const std::string& text);
std::string serialize_config(const ScenarioConfig& config);

bool config_equal(const ScenarioConfig& a, const ScenarioConfig& b);

// Builds the scenario (grid, fields, kernel); throws on geometry or
// volume-target violations.
Scenario make_scenario(const ScenarioConfig& config);

// Applies the grid-resolution floor delta_min >= 0.1 h^alpha and returns
// the effective schedule for this configuration.
ContinuationSchedule effective_schedule(const ScenarioConfig& config);

} // namespace fracfb
