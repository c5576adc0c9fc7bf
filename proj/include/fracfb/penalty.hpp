// The three penalization profiles and their derivative conventions.
//
//   g_sigma : C^1 convex obstacle penalty, linear slope -1/sigma below
//             -sigma, quadratic bridge t^2/(2 sigma^2) on [-sigma, 0],
//             zero above.
//   h_delta : volume regularizer, 0 below 0, t/delta on [0, delta], 1 above.
//             Derivative value at both kinks is 0.
//   f_eps   : volume penalty, slope 1/eps above gamma and eps below;
//             f'(gamma) := eps.
#pragma once

#include <stdexcept>

namespace fracfb {

double g_sigma(double t, double sigma);
double g_sigma_prime(double t, double sigma);

double h_delta(double t, double delta);
double h_delta_prime(double t, double delta);

double f_eps(double t, double epsilon, double gamma);
double f_eps_prime(double t, double epsilon, double gamma);

struct PenaltyParams {
    double sigma = 0.1;
    double delta = 0.1;
    double epsilon = 0.1;
    double gamma = 1.0;

    void validate() const {
        if (!(sigma > 0.0 && sigma < 1.0)) {
            throw std::invalid_argument("PenaltyParams: sigma must be in (0,1)");
        }
        if (!(delta > 0.0 && delta < 1.0)) {
            throw std::invalid_argument("PenaltyParams: delta must be in (0,1)");
        }
        if (!(epsilon > 0.0 && epsilon < 1.0)) {
            throw std::invalid_argument("PenaltyParams: epsilon must be in (0,1)");
        }
        if (!(gamma >= 0.0)) {
            throw std::invalid_argument("PenaltyParams: gamma must be non-negative");
        }
    }
};

} // namespace fracfb
