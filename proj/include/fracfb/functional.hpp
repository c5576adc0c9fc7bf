// Penalized energy assembly, its exact discrete gradient, the limit
// functional, Euler-Lagrange residuals and the variational-inequality check.
//
// The penalized energy of a field u is
//   I(u) = J_h(u) + sum_i g_sigma(u_i - phi_i) h^n
//               + f_eps( sum_{x_i notin Omega} h_delta(u_i) h^n ).
// Its gradient with respect to the value vector is
//   G_i = 4 h^n A_i + h^n g'_sigma(u_i - phi_i)
//       + h^n f'_eps(V) h'_delta(u_i) (1 - chi_i),
// where A is the constant-free operator sum (apply_raw) and V the
// h_delta-weighted complement volume.
//
// Euler-Lagrange quantities are reported for the operator in the
// stationarity convention E := -2 A, for which a critical point satisfies
// 2 E = g'_sigma(u - phi) + f'_eps(V) h'_delta(u) chi_complement verbatim.
#pragma once

#include <string>

#include "fracfb/grid.hpp"
#include "fracfb/kernel.hpp"
#include "fracfb/penalty.hpp"

namespace fracfb {

struct EnergyBreakdown {
    double J_value = 0.0;
    double obstacle_penalty = 0.0;
    double volume_penalty = 0.0;
    double total = 0.0;
    double measured_h_volume = 0.0;
};

// h_delta-weighted measure of {u > 0} outside the domain.
double measured_h_volume(const ScalarField& u, const ScalarField& chi_omega,
                         const PenaltyParams& params);

EnergyBreakdown penalized_energy(const KernelTable& kernel, const ScalarField& u,
                                 const ScalarField& phi, const ScalarField& chi_omega,
                                 const PenaltyParams& params);

ScalarField penalized_gradient(const KernelTable& kernel, const ScalarField& u,
                               const ScalarField& phi, const ScalarField& chi_omega,
                               const PenaltyParams& params);

// Variants reusing a precomputed constant-free operator application
// (apply_raw with tail), so one apply per iteration serves energy,
// gradient and stationarity.
ScalarField penalized_gradient_from_apply(const ScalarField& a_raw, const ScalarField& u,
                                          const ScalarField& phi,
                                          const ScalarField& chi_omega,
                                          const PenaltyParams& params);
double stationarity_residual_from_apply(const ScalarField& a_raw, const ScalarField& u,
                                        const ScalarField& phi,
                                        const ScalarField& chi_omega,
                                        const PenaltyParams& params, bool bounds_active,
                                        double upper_bound);

// One-sided descent direction: per coordinate the steeper improving
// one-sided slope, zero where the point is one-sided stationary (kink
// corners, active bounds). Coincides with penalized_gradient away from
// kinks. Scaled like the gradient (by h^n); its sup norm per unit cell is
// the stationarity residual.
ScalarField descent_direction_from_apply(const ScalarField& a_raw, const ScalarField& u,
                                         const ScalarField& phi,
                                         const ScalarField& chi_omega,
                                         const PenaltyParams& params, bool bounds_active,
                                         double upper_bound);

// J_h(u) + f_eps(|{u > tau_pos} \ Omega|) with the threshold volume.
double limit_energy_J_eps(const KernelTable& kernel, const ScalarField& u,
                          const ScalarField& chi_omega, double epsilon, double gamma,
                          double tau_pos);

enum class ElStage { SigmaDelta, Delta, Limit };

ElStage el_stage_from_label(const std::string& label); // throws on unknown label

struct ElResidual {
    // sup of the positive part of E on {u > phi + contact_tol} inside Omega
    double interior = 0.0;
    // sup of the stage-equation violation on the exterior positivity set;
    // for the limit stage the h_delta transition band (u <= delta) is the
    // discrete free-boundary layer and is excluded
    double exterior = 0.0;
    // sup of the negative part of E on the complement of Omega
    double complement = 0.0;
    int band_count = 0;         // exterior points with tau_pos < u < delta
    double multiplier_min = 0.0; // implied volume multiplier range on the band
    double multiplier_max = 0.0;
    // monitored only: inf of 2E over the grid, the measured counterpart of
    // the non-explicit lower bound in the inequality band
    double operator_min = 0.0;
};

ElResidual el_residual(const KernelTable& kernel, const ScalarField& u,
                       const ScalarField& phi, const ScalarField& chi_omega,
                       const PenaltyParams& params, ElStage stage, double contact_tol,
                       double tau_pos);

// Left-hand side of the stationarity variational inequality
//   2 J_h(w) - 2 B(w, u) + f'_eps(V(u)) sum_{Omega^c} h'_delta(u)(w - u) h^n
// for an admissible competitor w >= phi. Throws if w dips below phi.
double variational_inequality_check(const KernelTable& kernel, const ScalarField& u,
                                    const ScalarField& w, const ScalarField& phi,
                                    const ScalarField& chi_omega,
                                    const PenaltyParams& params);

// One-sided (subgradient) stationarity residual in sup norm per unit cell.
// At kink values of h_delta and f_eps the true one-sided slopes are used,
// so a kink-parked minimizer reports a small residual even though the
// single-valued gradient does not vanish there. With bounds_active the
// box constraints u in [0, upper_bound] absorb outward derivatives.
double stationarity_residual(const KernelTable& kernel, const ScalarField& u,
                             const ScalarField& phi, const ScalarField& chi_omega,
                             const PenaltyParams& params, bool bounds_active,
                             double upper_bound);

} // namespace fracfb
