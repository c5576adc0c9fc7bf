#include "fracfb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fracfb {

void SolveConfig::validate() const {
    if (!(grad_tol > 0.0)) throw std::invalid_argument("SolveConfig: grad_tol must be positive");
    if (max_iters < 1) throw std::invalid_argument("SolveConfig: max_iters must be >= 1");
    if (!(backtrack > 0.0 && backtrack < 1.0)) {
        throw std::invalid_argument("SolveConfig: backtrack factor must be in (0,1)");
    }
    if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0)) {
        throw std::invalid_argument("SolveConfig: armijo_c1 must be in (0,1)");
    }
}

void ContinuationSchedule::validate() const {
    if (!(sigma0 > 0.0 && sigma0 < 1.0) || !(delta0 > 0.0 && delta0 < 1.0)) {
        throw std::invalid_argument("ContinuationSchedule: sigma0/delta0 must be in (0,1)");
    }
    if (!(rho > 0.0 && rho < 1.0)) {
        throw std::invalid_argument("ContinuationSchedule: rho must be in (0,1)");
    }
    if (!(sigma_min > 0.0 && sigma_min <= sigma0) || !(delta_min > 0.0 && delta_min <= delta0)) {
        throw std::invalid_argument("ContinuationSchedule: parameter floors must be in (0, start]");
    }
    if (epsilon_grid.empty()) {
        throw std::invalid_argument("ContinuationSchedule: epsilon_grid must be non-empty");
    }
    for (std::size_t k = 0; k < epsilon_grid.size(); ++k) {
        if (!(epsilon_grid[k] > 0.0 && epsilon_grid[k] < 1.0)) {
            throw std::invalid_argument("ContinuationSchedule: epsilons must be in (0,1)");
        }
        if (k > 0 && !(epsilon_grid[k] < epsilon_grid[k - 1])) {
            throw std::invalid_argument("ContinuationSchedule: epsilon_grid must be strictly decreasing");
        }
    }
}

namespace {

std::vector<double> geometric_ladder(double start, double floor, double rho) {
    std::vector<double> out;
    double v = start;
    while (v > floor * (1.0 + 1e-12)) {
        out.push_back(v);
        v *= rho;
    }
    out.push_back(floor);
    return out;
}

} // namespace

std::vector<double> ContinuationSchedule::sigma_ladder() const {
    return geometric_ladder(sigma0, sigma_min, rho);
}

std::vector<double> ContinuationSchedule::delta_ladder() const {
    return geometric_ladder(delta0, delta_min, rho);
}

Scenario Scenario::build(const GridSpec& grid, const DomainSpec& domain,
                         const ObstacleSpec& obstacle, double alpha, double gamma,
                         double tau_pos, bool allow_zero_gamma, double c_norm_scale) {
    Scenario s;
    s.grid = grid;
    s.domain = domain;
    s.obstacle = obstacle;
    domain.validate(grid);
    s.chi_omega = indicator_omega(domain, grid);
    s.phi = sample_obstacle(obstacle, domain, grid);
    s.frac = FracParams::standard(grid.dimension, alpha);
    s.frac.c_norm *= c_norm_scale;
    s.gamma = gamma;
    s.allow_zero_gamma = allow_zero_gamma;
    s.tau_pos = tau_pos > 0.0 ? tau_pos : 1e-8 * obstacle.amplitude;

    if (gamma < 0.0) throw std::invalid_argument("Scenario: gamma must be non-negative");
    if (gamma == 0.0 && !allow_zero_gamma) {
        throw std::invalid_argument(
            "Scenario: gamma = 0 is degenerate; set the explicit override to accept it");
    }
    const double reachable = complement_measure(s.chi_omega);
    if (gamma >= reachable) {
        std::ostringstream msg;
        msg << "Scenario: volume target gamma = " << gamma
            << " is unreachable; the box minus the domain measures only " << reachable;
        throw std::invalid_argument(msg.str());
    }
    s.kernel = std::make_shared<KernelTable>(grid, s.frac);
    return s;
}

double positivity_volume_threshold(const ScalarField& u, const ScalarField& chi_omega,
                                   double tau_pos) {
    const double cell = u.grid.cell_volume();
    const long n = u.size();
    long count = 0;
    for (long i = 0; i < n; ++i) {
        if (chi_omega[i] == 0.0 && u[i] > tau_pos) ++count;
    }
    return count * cell;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double sup_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

struct EnergyEval {
    double total;
    double volume_h;
};

class FixedParamProblem {
  public:
    FixedParamProblem(const KernelTable& kernel, const ScalarField& phi,
                      const ScalarField& chi, const PenaltyParams& params)
        : kernel_(kernel), phi_(phi), chi_(chi), params_(params) {}

    EnergyEval energy(const ScalarField& u, long& evals) const {
        ++evals;
        const EnergyBreakdown b = penalized_energy(kernel_, u, phi_, chi_, params_);
        if (!std::isfinite(b.total)) {
            throw std::runtime_error("minimize_fixed_params: energy became non-finite");
        }
        return {b.total, b.measured_h_volume};
    }

    const KernelTable& kernel_;
    const ScalarField& phi_;
    const ScalarField& chi_;
    const PenaltyParams& params_;
};

void clip_field(ScalarField& u, bool active, double upper) {
    if (!active) return;
    for (double& v : u.values) v = std::min(std::max(v, 0.0), upper);
}

} // namespace

FixedSolveResult minimize_fixed_params(const KernelTable& kernel, ScalarField& u,
                                       const ScalarField& phi, const ScalarField& chi_omega,
                                       const PenaltyParams& params,
                                       const SolveConfig& config) {
    config.validate();
    params.validate();
    if (!u.all_finite()) {
        throw std::invalid_argument("minimize_fixed_params: start field must be finite");
    }

    FixedSolveResult res;
    const double cell = u.grid.cell_volume();
    const double upper = phi.max_abs();
    const bool project = config.clamp_safeguard;
    const FixedParamProblem prob(kernel, phi, chi_omega, params);

    clip_field(u, project, upper);
    EnergyEval cur = prob.energy(u, res.energy_evaluations);
    res.initial_energy = cur.total;

    std::vector<double> prev_u, prev_g;
    double step = 0.0;
    const double scale = std::max(upper, 1.0);

    for (long iter = 0; iter < config.max_iters; ++iter) {
        const ScalarField a = kernel.apply_raw_fast(u, true);
        // Step along the one-sided direction: it agrees with the gradient
        // away from kinks and vanishes at kink corners, so converged
        // coordinates are never pushed into a penalty wall.
        const ScalarField d =
            descent_direction_from_apply(a, u, phi, chi_omega, params, project, upper);
        res.residual = d.max_abs() / cell;
        {
            const ScalarField raw =
                penalized_gradient_from_apply(a, u, phi, chi_omega, params);
            res.gradient_sup = raw.max_abs() / cell;
        }

        if (res.residual <= config.grad_tol) {
            res.converged = true;
            res.iterations = iter;
            res.final_energy = cur.total;
            return res;
        }

        // Diagonal scaling by the known curvature of the smooth part
        // (operator row sums plus the obstacle bridge): the bridge stiffens
        // like 1/sigma^2 and an unscaled step cannot serve both blocks.
        ScalarField g(u.grid);
        for (long i = 0; i < u.size(); ++i) {
            const double t = u[i] - phi[i];
            const double g2 = (t > -params.sigma && t < 0.0)
                                  ? 1.0 / (params.sigma * params.sigma)
                                  : 0.0;
            const double curv = 4.0 * (kernel.rowsum_energy(i) + kernel.tail_raw(i)) + g2;
            g[i] = d[i] / (cell * curv);
        }

        // Barzilai-Borwein step after the first iteration, safeguarded.
        if (!prev_u.empty()) {
            std::vector<double> du(u.values.size()), dg(g.values.size());
            for (std::size_t i = 0; i < du.size(); ++i) {
                du[i] = u.values[i] - prev_u[i];
                dg[i] = g.values[i] - prev_g[i];
            }
            const double dudg = dot(du, dg);
            if (dudg > 0.0) {
                step = dot(du, du) / dudg;
            } else {
                step = 1.0;
            }
        } else {
            step = 1.0;
        }
        step = std::min(std::max(step, 1e-10), 1e4);
        if (step * g.max_abs() > 0.5 * scale) {
            step = 0.5 * scale / g.max_abs();
        }

        prev_u = u.values;
        prev_g = g.values;

        // Backtracking with projection; snap onto the volume kink when a
        // candidate step crosses it.
        bool accepted = false;
        double s = step;
        ScalarField cand(u.grid);
        for (int bt = 0; bt <= config.max_backtracks; ++bt) {
            for (std::size_t i = 0; i < u.values.size(); ++i) {
                cand.values[i] = u.values[i] - s * g.values[i];
            }
            clip_field(cand, project, upper);
            const EnergyEval ce = prob.energy(cand, res.energy_evaluations);

            double move2 = 0.0;
            for (std::size_t i = 0; i < u.values.size(); ++i) {
                const double dv = cand.values[i] - u.values[i];
                move2 += dv * dv;
            }
            // rounding slack: near stationarity the true decrease of the
            // stiff coordinates falls below double resolution of the energy
            const double slack = 4e-13 * (1.0 + std::abs(cur.total));
            const bool armijo =
                ce.total <= cur.total - (config.armijo_c1 / s) * move2 + slack;

            const bool crossed = (cur.volume_h - params.gamma) * (ce.volume_h - params.gamma) < 0.0;
            if (armijo || crossed) {
                double best_total = armijo ? ce.total : std::numeric_limits<double>::infinity();
                ScalarField best = cand;
                EnergyEval best_eval = ce;
                if (crossed) {
                    // Bisect the step fraction to land on V = gamma.
                    double lo = 0.0, hi = 1.0;
                    ScalarField mid(u.grid);
                    for (int it2 = 0; it2 < 60; ++it2) {
                        const double t = 0.5 * (lo + hi);
                        for (std::size_t i = 0; i < u.values.size(); ++i) {
                            mid.values[i] = u.values[i] - t * s * g.values[i];
                        }
                        clip_field(mid, project, upper);
                        const double vm = measured_h_volume(mid, chi_omega, params);
                        if ((cur.volume_h - params.gamma) * (vm - params.gamma) < 0.0) {
                            hi = t;
                        } else {
                            lo = t;
                        }
                    }
                    for (std::size_t i = 0; i < u.values.size(); ++i) {
                        mid.values[i] = u.values[i] - lo * s * g.values[i];
                    }
                    clip_field(mid, project, upper);
                    const EnergyEval me = prob.energy(mid, res.energy_evaluations);
                    if (me.total < best_total && me.total < cur.total) {
                        best_total = me.total;
                        best = mid;
                        best_eval = me;
                    }
                }
                if (best_total < std::numeric_limits<double>::infinity()) {
                    if (best_total > cur.total + 1e-12 * (1.0 + std::abs(cur.total))) {
                        res.energy_monotone = false;
                    }
                    u = best;
                    cur = best_eval;
                    accepted = true;
                    break;
                }
            }
            s *= config.backtrack;
        }

        if (!accepted) {
            if (res.residual <= 10.0 * config.grad_tol) {
                res.stalled = true;
                res.iterations = iter;
                res.final_energy = cur.total;
                return res;
            }
            std::ostringstream msg;
            msg << "minimize_fixed_params: line search failed after maximum backtracks"
                << " (iter " << iter << ", energy " << cur.total << ", residual "
                << res.residual << ", volume " << cur.volume_h << ", step " << step << ")";
            throw std::runtime_error(msg.str());
        }
        res.iterations = iter + 1;
    }

    res.final_energy = cur.total;
    res.converged = false;
    if (!project) {
        double clip = 0.0;
        for (double v : u.values) {
            clip = std::max({clip, -v, v - upper});
        }
        res.clip_magnitude = std::max(clip, 0.0);
    }
    return res;
}

namespace {

StageRecord run_stage(const Scenario& scenario, const PenaltyParams& params,
                      const SolveConfig& config, const char* phase, ScalarField& u,
                      double energy_ceiling, SolveReport& report) {
    StageRecord rec;
    rec.phase = phase;
    rec.sigma = params.sigma;
    rec.delta = params.delta;
    rec.epsilon = params.epsilon;

    const ScalarField before = u;
    rec.solve = minimize_fixed_params(*scenario.kernel, u, scenario.phi, scenario.chi_omega,
                                      params, config);
    if (!rec.solve.converged && !rec.solve.stalled) {
        report.all_converged = false;
        std::ostringstream w;
        w << "stage " << phase << " sigma=" << params.sigma << " delta=" << params.delta
          << " epsilon=" << params.epsilon << " hit max_iters with residual "
          << rec.solve.residual;
        report.warnings.push_back(w.str());
    }
    rec.energy = penalized_energy(*scenario.kernel, u, scenario.phi, scenario.chi_omega, params);
    rec.warm_diff_sup = sup_abs_diff(before.values, u.values);

    double viol = 0.0, supg = 0.0;
    for (long i = 0; i < u.size(); ++i) {
        viol = std::max(viol, scenario.phi[i] - u[i]);
        supg = std::max(supg, std::abs(g_sigma_prime(u[i] - scenario.phi[i], params.sigma)));
    }
    rec.max_obstacle_violation = std::max(viol, 0.0);
    rec.sup_g_prime = supg;
    rec.volume_threshold = positivity_volume_threshold(u, scenario.chi_omega, scenario.tau_pos);
    rec.ceiling_ok = rec.energy.total <= energy_ceiling + 1e-9 * (1.0 + std::abs(energy_ceiling));
    if (!rec.ceiling_ok) {
        report.warnings.push_back("energy ceiling J(phi) exceeded after a stage solve");
    }

    // Positivity set must keep a 2h margin from the box boundary.
    const GridSpec& grid = u.grid;
    const double lim = grid.half_width - 2.0 * grid.spacing();
    for (long i = 0; i < u.size(); ++i) {
        if (u[i] > scenario.tau_pos) {
            const Point p = grid.point(i);
            const double reach =
                grid.dimension == 1 ? std::abs(p[0]) : std::max(std::abs(p[0]), std::abs(p[1]));
            if (reach > lim) {
                rec.boundary_proximity_warning = true;
                break;
            }
        }
    }
    if (rec.boundary_proximity_warning) {
        report.warnings.push_back("positivity set within 2h of the box boundary");
    }
    return rec;
}

} // namespace

ScalarField continuation_solve(const Scenario& scenario,
                               const ContinuationSchedule& schedule,
                               const SolveConfig& config, double epsilon,
                               const ScalarField* warm_start, SolveReport& report) {
    schedule.validate();
    config.validate();

    ScalarField u = warm_start != nullptr ? *warm_start : scenario.phi;
    const double ceiling = gagliardo_energy(*scenario.kernel, scenario.phi);
    report.energy_ceiling = ceiling;
    report.kernel_memory_bytes = scenario.kernel->memory_bytes();

    PenaltyParams params;
    params.gamma = scenario.gamma;
    params.epsilon = epsilon;
    params.delta = schedule.delta0;

    for (double sigma : schedule.sigma_ladder()) {
        params.sigma = sigma;
        report.stages.push_back(
            run_stage(scenario, params, config, "sigma", u, ceiling, report));
    }
    const std::vector<double> deltas = schedule.delta_ladder();
    for (std::size_t k = 1; k < deltas.size(); ++k) { // delta0 already solved
        params.delta = deltas[k];
        report.stages.push_back(
            run_stage(scenario, params, config, "delta", u, ceiling, report));
    }

    report.final_residual = report.stages.empty() ? 0.0 : report.stages.back().solve.residual;
    report.final_energy = penalized_energy(*scenario.kernel, u, scenario.phi,
                                           scenario.chi_omega, params);
    return u;
}

TuneResult volume_tune_epsilon(const Scenario& scenario,
                               const ContinuationSchedule& schedule,
                               const SolveConfig& config, double vol_tol) {
    schedule.validate();
    TuneResult out;
    out.report.selected_epsilon = 0.0;

    ScalarField warm;
    bool have_warm = false;
    double best_err = std::numeric_limits<double>::infinity();

    for (double eps : schedule.epsilon_grid) {
        ScalarField u = continuation_solve(scenario, schedule, config, eps,
                                           have_warm ? &warm : nullptr, out.report);
        warm = u;
        have_warm = true;

        EpsilonRecord rec;
        rec.epsilon = eps;
        rec.volume_threshold =
            positivity_volume_threshold(u, scenario.chi_omega, scenario.tau_pos);
        {
            PenaltyParams p;
            p.gamma = scenario.gamma;
            p.epsilon = eps;
            p.delta = schedule.delta_min;
            p.sigma = schedule.sigma_min;
            rec.volume_h = measured_h_volume(u, scenario.chi_omega, p);
        }
        rec.relative_error = scenario.gamma > 0.0
                                 ? std::abs(rec.volume_threshold - scenario.gamma) / scenario.gamma
                                 : rec.volume_threshold;
        rec.converged = out.report.all_converged;
        out.report.epsilon_trace.push_back(rec);

        if (rec.relative_error < best_err) {
            best_err = rec.relative_error;
            out.epsilon_star = eps;
            out.u = u;
        }
        if (rec.relative_error <= vol_tol) {
            out.epsilon_star = eps;
            out.u = u;
            out.report.volume_attained = true;
            break;
        }
    }
    if (scenario.gamma == 0.0) {
        out.report.warnings.push_back(
            "gamma = 0 accepted with absolute volume tolerance (degenerate target)");
    }
    if (!out.report.volume_attained) {
        out.report.warnings.push_back("no epsilon in the grid met the volume tolerance");
    }
    out.report.selected_epsilon = out.epsilon_star;
    return out;
}

} // namespace fracfb
