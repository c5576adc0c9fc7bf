// Adaptive Simpson and fixed-order Gauss-Legendre quadrature helpers.
#pragma once

#include <functional>

namespace fracfb {

// Recursive adaptive Simpson on [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 40);

// 32-point Gauss-Legendre on [a, b].
double gauss_legendre_32(const std::function<double(double)>& f, double a, double b);

} // namespace fracfb
