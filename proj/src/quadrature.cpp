#include "fracfb/quadrature.hpp"

#include <array>
#include <cmath>

namespace fracfb {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_rec(const std::function<double(double)>& f, double a, double fa, double b,
                    double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

struct GaussTable {
    std::array<double, 32> x{};
    std::array<double, 32> w{};
};

// Nodes/weights by Newton iteration on the Legendre recurrence.
GaussTable make_gauss32() {
    GaussTable t;
    const int n = 32;
    for (int i = 0; i < n / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        t.x[static_cast<std::size_t>(i)] = -x;
        t.w[static_cast<std::size_t>(i)] = w;
        t.x[static_cast<std::size_t>(n - 1 - i)] = x;
        t.w[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return t;
}

const GaussTable& gauss32() {
    static const GaussTable t = make_gauss32();
    return t;
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = simpson(a, fa, b, fb, fm);
    return adaptive_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double gauss_legendre_32(const std::function<double(double)>& f, double a, double b) {
    const GaussTable& t = gauss32();
    const double c = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 32; ++i) {
        acc += t.w[static_cast<std::size_t>(i)] * f(c + hw * t.x[static_cast<std::size_t>(i)]);
    }
    return acc * hw;
}

} // namespace fracfb
