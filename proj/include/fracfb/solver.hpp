// Fixed-parameter minimization of the penalized energy and the parameter
// continuation: sigma down first, then delta down, with epsilon selected
// from a decreasing grid by volume attainment.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fracfb/functional.hpp"
#include "fracfb/grid.hpp"
#include "fracfb/kernel.hpp"
#include "fracfb/penalty.hpp"

namespace fracfb {

struct SolveConfig {
    double grad_tol = 1e-6;
    long max_iters = 20000;
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 60;
    bool clamp_safeguard = true;

    void validate() const;
};

struct ContinuationSchedule {
    double sigma0 = 0.02;
    double delta0 = 0.4;
    double rho = 0.5;
    double sigma_min = 1e-3;
    double delta_min = 1e-3;
    std::vector<double> epsilon_grid = {0.4, 0.2, 0.1, 0.05};

    void validate() const;
    std::vector<double> sigma_ladder() const;
    std::vector<double> delta_ladder() const;
};

// Assembled problem instance: geometry, obstacle and kernel on one grid.
struct Scenario {
    GridSpec grid;
    DomainSpec domain;
    ObstacleSpec obstacle;
    ScalarField phi;
    ScalarField chi_omega;
    FracParams frac;
    double gamma = 1.0;
    double tau_pos = 0.0; // positivity threshold; 0 means 1e-8 * amplitude
    bool allow_zero_gamma = false;
    std::shared_ptr<KernelTable> kernel;

    static Scenario build(const GridSpec& grid, const DomainSpec& domain,
                          const ObstacleSpec& obstacle, double alpha, double gamma,
                          double tau_pos = 0.0, bool allow_zero_gamma = false,
                          double c_norm_scale = 1.0);
};

struct FixedSolveResult {
    long iterations = 0;
    long energy_evaluations = 0;
    double residual = 0.0;       // one-sided stationarity, sup per unit cell
    double gradient_sup = 0.0;   // single-valued gradient sup per unit cell
    double initial_energy = 0.0;
    double final_energy = 0.0;
    bool converged = false;
    bool stalled = false; // line search exhausted at a near-stationary kink
    bool energy_monotone = true;
    double clip_magnitude = 0.0;
};

FixedSolveResult minimize_fixed_params(const KernelTable& kernel, ScalarField& u,
                                       const ScalarField& phi,
                                       const ScalarField& chi_omega,
                                       const PenaltyParams& params,
                                       const SolveConfig& config);

struct StageRecord {
    std::string phase; // "sigma" or "delta"
    double sigma = 0.0;
    double delta = 0.0;
    double epsilon = 0.0;
    FixedSolveResult solve;
    EnergyBreakdown energy;
    double max_obstacle_violation = 0.0; // sup (phi - u)_+
    double sup_g_prime = 0.0;            // sup |g'_sigma(u - phi)|
    double warm_diff_sup = 0.0;          // sup |u - u_previous_stage|
    double volume_threshold = 0.0;       // |{u > tau_pos} \ Omega|
    bool ceiling_ok = true;              // I(u) <= J_h(phi)
    bool boundary_proximity_warning = false;
};

struct EpsilonRecord {
    double epsilon = 0.0;
    double volume_threshold = 0.0;
    double volume_h = 0.0;
    double relative_error = 0.0;
    bool converged = true;
};

struct SolveReport {
    std::vector<StageRecord> stages;
    std::vector<EpsilonRecord> epsilon_trace;
    double selected_epsilon = 0.0;
    bool volume_attained = false;
    bool all_converged = true;
    double energy_ceiling = 0.0; // J_h(phi)
    double final_residual = 0.0;
    EnergyBreakdown final_energy;
    std::vector<std::string> warnings;
    std::size_t kernel_memory_bytes = 0;
};

// Warm-started sweep at fixed epsilon: sigma ladder at delta0, then delta
// ladder at sigma_min. Appends stage records to the report.
ScalarField continuation_solve(const Scenario& scenario,
                               const ContinuationSchedule& schedule,
                               const SolveConfig& config, double epsilon,
                               const ScalarField* warm_start, SolveReport& report);

struct TuneResult {
    double epsilon_star = 0.0;
    ScalarField u;
    SolveReport report;
};

// Walks the decreasing epsilon grid, warm-starting each continuation from
// the previous solution, and returns the largest epsilon whose threshold
// volume matches gamma within vol_tol (relative; absolute when gamma = 0).
TuneResult volume_tune_epsilon(const Scenario& scenario,
                               const ContinuationSchedule& schedule,
                               const SolveConfig& config, double vol_tol);

double positivity_volume_threshold(const ScalarField& u, const ScalarField& chi_omega,
                                   double tau_pos);

} // namespace fracfb
