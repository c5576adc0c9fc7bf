#include "fracfb/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fracfb/csv.hpp"
#include "fracfb/diagnostics.hpp"
#include "fracfb/functional.hpp"
#include "fracfb/kernel.hpp"
#include "fracfb/solver.hpp"

namespace fracfb {

namespace {

namespace fs = std::filesystem;

bool write_file(const std::string& dir, const std::string& name, const std::string& body,
                std::string& err) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        err = "cannot create output directory '" + dir + "': " + ec.message();
        return false;
    }
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        err = "cannot open '" + path.string() + "' for writing";
        return false;
    }
    out << body;
    out.flush();
    if (!out) {
        err = "write failed for '" + path.string() + "'";
        return false;
    }
    return true;
}

void append_config_echo(Report& rep, const ScenarioConfig& config) {
    std::istringstream iss(serialize_config(config));
    std::string line;
    while (std::getline(iss, line)) {
        const std::size_t eq = line.find(" = ");
        if (eq == std::string::npos) continue;
        rep.put("config." + line.substr(0, eq), line.substr(eq + 3));
    }
}

std::vector<double> diagnostic_radii(const GridSpec& grid) {
    std::vector<double> radii;
    double r = 3.2 * grid.spacing();
    const double cap = 0.5 * grid.half_width;
    while (r <= cap || radii.size() < 3) {
        radii.push_back(r);
        r *= 1.6;
        if (radii.size() >= 12) break;
    }
    return radii;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

void append_stage_records(Report& rep, const SolveReport& report) {
    rep.put("continuation.stage_count", static_cast<long>(report.stages.size()));
    rep.put("continuation.energy_ceiling", report.energy_ceiling);
    for (std::size_t k = 0; k < report.stages.size(); ++k) {
        const StageRecord& s = report.stages[k];
        const std::string pre = "stage." + std::to_string(k) + ".";
        rep.put(pre + "phase", s.phase);
        rep.put(pre + "sigma", s.sigma);
        rep.put(pre + "delta", s.delta);
        rep.put(pre + "epsilon", s.epsilon);
        rep.put(pre + "iterations", s.solve.iterations);
        rep.put(pre + "converged", s.solve.converged);
        rep.put(pre + "stalled", s.solve.stalled);
        rep.put(pre + "residual", s.solve.residual);
        rep.put(pre + "gradient_sup", s.solve.gradient_sup);
        rep.put(pre + "energy.total", s.energy.total);
        rep.put(pre + "energy.J", s.energy.J_value);
        rep.put(pre + "energy.obstacle", s.energy.obstacle_penalty);
        rep.put(pre + "energy.volume_penalty", s.energy.volume_penalty);
        rep.put(pre + "energy.h_volume", s.energy.measured_h_volume);
        rep.put(pre + "obstacle_violation", s.max_obstacle_violation);
        rep.put(pre + "sup_g_prime", s.sup_g_prime);
        rep.put(pre + "warm_diff", s.warm_diff_sup);
        rep.put(pre + "volume_threshold", s.volume_threshold);
        rep.put(pre + "ceiling_ok", s.ceiling_ok);
        rep.put(pre + "boundary_warning", s.boundary_proximity_warning);
        rep.put(pre + "energy_monotone", s.solve.energy_monotone);
    }
    for (std::size_t k = 0; k < report.epsilon_trace.size(); ++k) {
        const EpsilonRecord& e = report.epsilon_trace[k];
        const std::string pre = "epsilon." + std::to_string(k) + ".";
        rep.put(pre + "value", e.epsilon);
        rep.put(pre + "volume_threshold", e.volume_threshold);
        rep.put(pre + "volume_h", e.volume_h);
        rep.put(pre + "relative_error", e.relative_error);
        rep.put(pre + "converged", e.converged);
    }
    for (std::size_t k = 0; k < report.warnings.size(); ++k) {
        rep.put("warning." + std::to_string(k), report.warnings[k]);
    }
    rep.put("warnings.count", static_cast<long>(report.warnings.size()));
}

} // namespace

std::string resolve_output_dir(const ScenarioConfig& config) {
    const char* env = std::getenv("FRACFB_OUT_DIR");
    if (env != nullptr && env[0] != '\0') return std::string(env);
    return config.output_dir;
}

std::string append_diagnostics(Report& rep, const Scenario& scenario, const ScalarField& u,
                               const ScenarioConfig& config) {
    const double tau = scenario.tau_pos;
    const GridSpec& grid = u.grid;

    // 1 bounds
    const BoundsReport bounds = bounds_check(u, scenario.phi);
    rep.put("diagnostics.bounds.min", bounds.min_u);
    rep.put("diagnostics.bounds.max", bounds.max_u);
    rep.put("diagnostics.bounds.lower_violation", bounds.lower_violation);
    rep.put("diagnostics.bounds.upper_violation", bounds.upper_violation);

    // 2 volume
    const double vol = positivity_volume(u, scenario.chi_omega, tau);
    rep.put("diagnostics.volume.threshold", vol);
    rep.put("diagnostics.volume.gamma", scenario.gamma);
    rep.put("diagnostics.volume.relative_error",
            scenario.gamma > 0.0 ? std::abs(vol - scenario.gamma) / scenario.gamma : vol);

    // 3 holder
    const double alpha = scenario.frac.alpha;
    const HolderEstimate ha = holder_seminorm(u, alpha, config.holder_stride);
    const HolderEstimate hl = holder_seminorm(u, 0.5 * (alpha + 1.0), config.holder_stride);
    rep.put("diagnostics.holder.alpha_seminorm", ha.seminorm);
    rep.put("diagnostics.holder.alpha_pairs", ha.pair_count);
    rep.put("diagnostics.holder.upper_lambda", hl.lambda);
    rep.put("diagnostics.holder.upper_seminorm", hl.seminorm);

    // 7 boundary (extracted once, reused by 4-5)
    const FreeBoundaryExtract fb = free_boundary_extract(u, tau, &scenario.domain);
    const std::vector<double> radii = diagnostic_radii(grid);

    // 4 nondegeneracy
    const std::vector<GrowthFit> fits = nondegeneracy_scan(u, fb, radii, alpha);
    std::vector<double> slopes;
    double min_ratio = std::numeric_limits<double>::infinity();
    long defined = 0;
    for (const GrowthFit& f : fits) {
        if (f.defined) {
            ++defined;
            slopes.push_back(f.slope);
            min_ratio = std::min(min_ratio, f.min_ratio);
        }
    }
    rep.put("diagnostics.nondegeneracy.defined_points", defined);
    rep.put("diagnostics.nondegeneracy.median_slope", median_of(slopes));
    rep.put("diagnostics.nondegeneracy.min_growth_ratio",
            defined > 0 ? min_ratio : 0.0);

    // 5 density
    const std::vector<DensityResult> dens = density_check(u, fb, radii, tau);
    double min_pos = std::numeric_limits<double>::infinity();
    double min_zero = std::numeric_limits<double>::infinity();
    long flagged = 0;
    for (const DensityResult& d : dens) {
        if (d.flagged) {
            ++flagged;
            continue;
        }
        min_pos = std::min(min_pos, d.min_pos_density);
        min_zero = std::min(min_zero, d.min_zero_density);
    }
    const bool any_density = static_cast<long>(dens.size()) > flagged;
    rep.put("diagnostics.density.min_positive", any_density ? min_pos : 0.0);
    rep.put("diagnostics.density.min_zero", any_density ? min_zero : 0.0);
    rep.put("diagnostics.density.flagged_points", flagged);

    // 6 harnack
    bool harnack_ok = true;
    try {
        const HarnackResult hr = harnack_ratio(u, scenario.phi, scenario.chi_omega, tau,
                                               config.harnack_shrink, 10.0 * config.grad_tol);
        rep.put("diagnostics.harnack.ratio", hr.ratio);
        rep.put("diagnostics.harnack.sup", hr.sup);
        rep.put("diagnostics.harnack.inf", hr.inf);
        rep.put("diagnostics.harnack.region_size", hr.region_size);
        rep.put("diagnostics.harnack.infinite", hr.infinite);
    } catch (const std::exception& ex) {
        harnack_ok = false;
        rep.put("diagnostics.harnack.error", ex.what());
    }
    (void)harnack_ok;

    rep.put("diagnostics.boundary.face_count", static_cast<long>(fb.faces.size()));
    rep.put("diagnostics.boundary.measure", fb.measure_estimate);
    rep.put("diagnostics.boundary.point_count", static_cast<long>(fb.points.size()));
    long interior_pts = 0;
    for (const BoundaryPoint& p : fb.points) {
        if (p.interior) ++interior_pts;
    }
    rep.put("diagnostics.boundary.interior_points", interior_pts);
    rep.put("diagnostics.boundary.exterior_points",
            static_cast<long>(fb.points.size()) - interior_pts);
    rep.put("diagnostics.boundary.everywhere_positive", fb.everywhere_positive_warning);

    // per-point dump
    std::string csv = grid.dimension == 1 ? "x,slope,min_density_pos,min_density_zero\n"
                                          : "x,y,slope,min_density_pos,min_density_zero\n";
    for (std::size_t k = 0; k < fb.points.size(); ++k) {
        const Point p = grid.point(fb.points[k].index);
        csv += format_double(p[0]);
        if (grid.dimension == 2) csv += "," + format_double(p[1]);
        const double slope = k < fits.size() && fits[k].defined ? fits[k].slope : std::nan("");
        csv += "," + format_double(slope);
        if (k < dens.size()) {
            csv += "," + format_double(dens[k].min_pos_density);
            csv += "," + format_double(dens[k].min_zero_density);
        } else {
            csv += ",nan,nan";
        }
        csv += "\n";
    }
    return csv;
}

int cmd_solve(const ScenarioConfig& config) {
    try {
        const auto t0 = std::chrono::steady_clock::now();
        const Scenario scenario = make_scenario(config);
        std::fprintf(stderr, "fracfb solve: kernel precompute %.3f s, %zu bytes\n",
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                         .count(),
                     scenario.kernel->memory_bytes());
        const ContinuationSchedule schedule = effective_schedule(config);
        SolveConfig sc;
        sc.grad_tol = config.grad_tol;
        sc.max_iters = config.max_iters;
        sc.clamp_safeguard = config.clamp_safeguard;

        ScalarField u;
        SolveReport report;
        if (schedule.epsilon_grid.size() > 1) {
            TuneResult tune = volume_tune_epsilon(scenario, schedule, sc, config.vol_tol);
            u = tune.u;
            report = tune.report;
        } else {
            u = continuation_solve(scenario, schedule, sc, schedule.epsilon_grid.front(),
                                   nullptr, report);
            report.selected_epsilon = schedule.epsilon_grid.front();
            const double vol = positivity_volume_threshold(u, scenario.chi_omega, scenario.tau_pos);
            const double err =
                scenario.gamma > 0.0 ? std::abs(vol - scenario.gamma) / scenario.gamma : vol;
            report.volume_attained = err <= config.vol_tol;
        }

        Report rep;
        rep.put("tool", "fracfb");
        rep.put("mode", "solve");
        append_config_echo(rep, config);
        rep.put("kernel.memory_bytes", static_cast<long>(report.kernel_memory_bytes));
        append_stage_records(rep, report);
        rep.put("selected.epsilon", report.selected_epsilon);
        rep.put("selected.volume_attained", report.volume_attained);
        rep.put("final.residual", report.final_residual);
        rep.put("final.energy.total", report.final_energy.total);
        rep.put("final.energy.J", report.final_energy.J_value);
        rep.put("final.energy.obstacle", report.final_energy.obstacle_penalty);
        rep.put("final.energy.volume_penalty", report.final_energy.volume_penalty);
        rep.put("final.energy.h_volume", report.final_energy.measured_h_volume);
        rep.put("final.volume_threshold",
                positivity_volume_threshold(u, scenario.chi_omega, scenario.tau_pos));

        PenaltyParams params;
        params.sigma = schedule.sigma_min;
        params.delta = schedule.delta_min;
        params.epsilon = report.selected_epsilon > 0.0 ? report.selected_epsilon
                                                       : schedule.epsilon_grid.front();
        params.gamma = scenario.gamma;
        const ElResidual el =
            el_residual(*scenario.kernel, u, scenario.phi, scenario.chi_omega, params,
                        ElStage::Limit, 10.0 * config.grad_tol, scenario.tau_pos);
        rep.put("el.interior", el.interior);
        rep.put("el.exterior", el.exterior);
        rep.put("el.complement", el.complement);
        rep.put("el.band_count", el.band_count);
        rep.put("el.multiplier_min", el.multiplier_min);
        rep.put("el.multiplier_max", el.multiplier_max);
        rep.put("el.operator_min", el.operator_min);

        std::string diag_csv;
        if (config.diagnostics_enabled) {
            diag_csv = append_diagnostics(rep, scenario, u, config);
        }

        const bool flagged = !report.all_converged || !report.volume_attained;
        rep.put("exit.status", flagged ? "flagged" : "converged");

        const std::string dir = resolve_output_dir(config);
        std::string err;
        if (!write_file(dir, "field.csv", field_to_csv(u), err) ||
            !write_file(dir, "metrics.txt", rep.serialize(), err) ||
            (config.diagnostics_enabled && !write_file(dir, "diagnostics.csv", diag_csv, err))) {
            std::cerr << "fracfb solve: " << err << "\n";
            return 1;
        }
        return flagged ? 2 : 0;
    } catch (const std::exception& ex) {
        std::cerr << "fracfb solve: " << ex.what() << "\n";
        return 1;
    }
}

namespace {

struct TrendCheck {
    std::vector<double> errors;
    bool monotone(double slack = 1.02) const {
        for (std::size_t k = 1; k < errors.size(); ++k) {
            if (errors[k] > errors[k - 1] * slack + 1e-15) return false;
        }
        return true;
    }
};

} // namespace

int cmd_validate_kernel(const ScenarioConfig& config) {
    try {
        Report rep;
        rep.put("tool", "fracfb");
        rep.put("mode", "validate-kernel");
        const double alpha = config.alpha;
        rep.put("kernel.alpha", alpha);
        bool all_ok = true;

        // constant-field annihilation, tail disabled, in the config dimension
        {
            const std::vector<int> res = config.dimension == 1 ? std::vector<int>{101, 201, 401}
                                                               : std::vector<int>{17, 25, 33};
            int idx = 0;
            for (int n : res) {
                const GridSpec grid = build_grid(config.dimension, 2.0, n);
                FracParams fp = FracParams::standard(config.dimension, alpha);
                fp.c_norm *= config.c_norm_scale;
                const KernelTable kernel(grid, fp);
                ScalarField ones(grid, 3.0);
                const ScalarField dense = kernel.apply_dense(ones, false);
                const ScalarField fast = kernel.apply_fast(ones, false);
                double scale = 0.0;
                for (long i = 0; i < grid.point_count(); ++i) {
                    scale = std::max(scale, fp.c_norm * kernel.rowsum_energy(i) * 3.0);
                }
                const double dres = dense.max_abs() / scale;
                const double fres = fast.max_abs() / scale;
                const std::string pre = "constant." + std::to_string(idx++) + ".";
                rep.put(pre + "points", n);
                rep.put(pre + "dense_residual", dres);
                rep.put(pre + "fast_residual", fres);
                if (dres > 1e-12 || fres > 1e-12) all_ok = false;
            }
        }

        // profile constancy vs the quadrature oracle (1D)
        {
            const double support = 1.0;
            const auto profile = [alpha](double x) {
                const double s = 1.0 - x * x;
                return s > 0.0 ? std::pow(s, alpha) : 0.0;
            };
            const std::vector<double> sample_x = {0.0, 0.25, -0.25, 0.5, -0.5};
            std::vector<double> oracle(sample_x.size());
            for (std::size_t k = 0; k < sample_x.size(); ++k) {
                oracle[k] = pv_integral_oracle_1d(profile, sample_x[k], alpha, support, 1e-8);
            }
            TrendCheck trend;
            int idx = 0;
            double hfin = 0.0;
            for (int n : {101, 201, 401}) {
                const GridSpec grid = build_grid(1, 2.0, n);
                FracParams fp = FracParams::standard(1, alpha);
                fp.c_norm *= config.c_norm_scale;
                const KernelTable kernel(grid, fp);
                const ScalarField u = ScalarField::from_fn(
                    grid, [&](Point p) { return profile(p[0]); });
                const ScalarField a = kernel.apply_dense(u, true);
                double worst = 0.0;
                for (std::size_t k = 0; k < sample_x.size(); ++k) {
                    // nearest grid index to the sample point
                    const double h = grid.spacing();
                    const long i = std::lround((sample_x[k] + grid.half_width) / h);
                    worst = std::max(worst, std::abs(a[i] - oracle[k]) / std::abs(oracle[k]));
                }
                trend.errors.push_back(worst);
                hfin = grid.spacing();
                const std::string pre = "profile." + std::to_string(idx++) + ".";
                rep.put(pre + "points", n);
                rep.put(pre + "max_rel_error", worst);
            }
            rep.put("profile.oracle_center", oracle[0]);
            // the omitted singular cell contributes O(h^(2-2a)); hold the
            // final error to that scale (2% at alpha = 1/2, N = 401)
            const double c = normalization_constant(1, alpha);
            const double tol = 4.0 * c * std::pow(0.5 * hfin, 2.0 - 2.0 * alpha) /
                                   ((2.0 - 2.0 * alpha) * std::abs(oracle[0])) +
                               0.01;
            rep.put("profile.tolerance", tol);
            const bool ok = trend.monotone() && trend.errors.back() <= tol;
            rep.put("profile.pass", ok);
            if (!ok) all_ok = false;
        }

        // Fourier symbol at 3 resolutions (1D). The box grows as alpha
        // shrinks: the heavy tail makes the truncated-cosine remainder the
        // dominant error for small alpha.
        {
            const double k_wave = 1.0;
            const double box = alpha < 0.4 ? 16.0 : (alpha < 0.65 ? 12.0 : 10.0);
            TrendCheck trend;
            int idx = 0;
            double hfin = 0.0;
            for (int n : {101, 201, 401}) {
                const GridSpec grid = build_grid(1, box, n);
                FracParams fp = FracParams::standard(1, alpha);
                fp.c_norm *= config.c_norm_scale;
                const KernelTable kernel(grid, fp);
                const ScalarField u = ScalarField::from_fn(
                    grid, [&](Point p) { return std::cos(k_wave * p[0]); });
                const ScalarField a = kernel.apply_dense(u, true);
                const long center = grid.point_count() / 2;
                const double symbol = std::pow(std::abs(k_wave), 2.0 * alpha);
                const double err = std::abs(a[center] / symbol - 1.0);
                trend.errors.push_back(err);
                hfin = grid.spacing();
                const std::string pre = "symbol." + std::to_string(idx++) + ".";
                rep.put(pre + "points", n);
                rep.put(pre + "ratio_error", err);
            }
            // scaled tolerance: quadrature error of the omitted singular cell
            const double c = normalization_constant(1, alpha);
            const double tol =
                4.0 * c * std::pow(0.5 * hfin, 2.0 - 2.0 * alpha) / (2.0 - 2.0 * alpha) + 0.01;
            rep.put("symbol.tolerance", tol);
            const bool ok = trend.monotone() && trend.errors.back() <= tol;
            rep.put("symbol.pass", ok);
            if (!ok) all_ok = false;
        }

        rep.put("exit.status", all_ok ? "pass" : "fail");
        const std::string dir = resolve_output_dir(config);
        std::string err;
        if (!write_file(dir, "kernel_report.txt", rep.serialize(), err)) {
            std::cerr << "fracfb validate-kernel: " << err << "\n";
            return 1;
        }
        return all_ok ? 0 : 2;
    } catch (const std::exception& ex) {
        std::cerr << "fracfb validate-kernel: " << ex.what() << "\n";
        return 1;
    }
}

int cmd_diagnose(const ScenarioConfig& config, const std::string& field_csv_path) {
    try {
        const Scenario scenario = make_scenario(config);
        std::ifstream in(field_csv_path, std::ios::binary);
        if (!in) {
            std::cerr << "fracfb diagnose: cannot open '" << field_csv_path << "'\n";
            return 1;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        const ScalarField u = field_from_csv(buf.str(), scenario.grid);

        Report rep;
        rep.put("tool", "fracfb");
        rep.put("mode", "diagnose");
        append_config_echo(rep, config);
        const std::string csv = append_diagnostics(rep, scenario, u, config);

        const std::string dir = resolve_output_dir(config);
        std::string err;
        if (!write_file(dir, "diagnostics_summary.txt", rep.serialize(), err) ||
            !write_file(dir, "diagnostics.csv", csv, err)) {
            std::cerr << "fracfb diagnose: " << err << "\n";
            return 1;
        }
        return 0;
    } catch (const std::exception& ex) {
        std::cerr << "fracfb diagnose: " << ex.what() << "\n";
        return 1;
    }
}

int cmd_sweep_epsilon(const ScenarioConfig& config) {
    try {
        const Scenario scenario = make_scenario(config);
        const ContinuationSchedule schedule = effective_schedule(config);
        SolveConfig sc;
        sc.grad_tol = config.grad_tol;
        sc.max_iters = config.max_iters;
        sc.clamp_safeguard = config.clamp_safeguard;

        TuneResult tune = volume_tune_epsilon(scenario, schedule, sc, config.vol_tol);
        Report rep;
        rep.put("tool", "fracfb");
        rep.put("mode", "sweep-epsilon");
        append_config_echo(rep, config);
        append_stage_records(rep, tune.report);
        rep.put("selected.epsilon", tune.epsilon_star);
        rep.put("selected.volume_attained", tune.report.volume_attained);
        rep.put("exit.status", tune.report.volume_attained ? "converged" : "flagged");

        const std::string dir = resolve_output_dir(config);
        std::string err;
        if (!write_file(dir, "sweep_metrics.txt", rep.serialize(), err)) {
            std::cerr << "fracfb sweep-epsilon: " << err << "\n";
            return 1;
        }
        return tune.report.volume_attained ? 0 : 2;
    } catch (const std::exception& ex) {
        std::cerr << "fracfb sweep-epsilon: " << ex.what() << "\n";
        return 1;
    }
}

} // namespace fracfb
