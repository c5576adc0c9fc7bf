#include "fracfb/penalty.hpp"

namespace fracfb {

double g_sigma(double t, double sigma) {
    if (t >= 0.0) return 0.0;
    if (t <= -sigma) return -(t + 0.5 * sigma) / sigma;
    return t * t / (2.0 * sigma * sigma);
}

double g_sigma_prime(double t, double sigma) {
    if (t >= 0.0) return 0.0;
    if (t <= -sigma) return -1.0 / sigma;
    return t / (sigma * sigma);
}

double h_delta(double t, double delta) {
    if (t <= 0.0) return 0.0;
    if (t >= delta) return 1.0;
    return t / delta;
}

double h_delta_prime(double t, double delta) {
    if (t <= 0.0 || t >= delta) return 0.0;
    return 1.0 / delta;
}

double f_eps(double t, double epsilon, double gamma) {
    if (t >= gamma) return (t - gamma) / epsilon;
    return epsilon * (t - gamma);
}

double f_eps_prime(double t, double epsilon, double gamma) {
    if (t > gamma) return 1.0 / epsilon;
    return epsilon;
}

} // namespace fracfb
