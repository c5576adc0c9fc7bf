#include "fracfb/kernel.hpp"

#include <cmath>
#include <functional>
#include <algorithm>
#include <limits>
#include <vector>
#include <stdexcept>

#include "fracfb/quadrature.hpp"
#include "fracfb/runtime.hpp"

namespace fracfb {

double normalization_constant(int dimension, double alpha) {
    if (dimension != 1 && dimension != 2) {
        throw std::invalid_argument("normalization_constant: dimension must be 1 or 2");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("normalization_constant: alpha must be in (0,1)");
    }
    // |Gamma(-a)| = Gamma(1-a)/a for a in (0,1)
    const double n2 = 0.5 * dimension;
    return std::pow(4.0, alpha) * std::tgamma(n2 + alpha) * alpha /
           (std::pow(M_PI, n2) * std::tgamma(1.0 - alpha));
}

FracParams FracParams::standard(int dimension, double alpha) {
    return FracParams{alpha, normalization_constant(dimension, alpha)};
}

namespace {

// Vertical-line factor: int_R (a^2 + t^2)^(-1-alpha) dt = B(alpha) |a|^(-1-2alpha)
double full_line_factor(double alpha) {
    return std::sqrt(M_PI) * std::tgamma(alpha + 0.5) / std::tgamma(alpha + 1.0);
}

// G(a, c) = int_c^inf (a^2 + t^2)^(-1-alpha) dt, c > 0.
double half_line_integral(double a, double c, double alpha) {
    const double aa = std::abs(a);
    if (aa < 1e-300) {
        return std::pow(c, -1.0 - 2.0 * alpha) / (1.0 + 2.0 * alpha);
    }
    const double theta0 = std::atan2(c, aa);
    const double val = gauss_legendre_32(
        [alpha](double th) { return std::pow(std::cos(th), 2.0 * alpha); }, theta0, 0.5 * M_PI);
    return std::pow(aa, -1.0 - 2.0 * alpha) * val;
}

// Tail integral over the complement of [-Lp, Lp]^2 at an interior point.
double tail_raw_2d(double x1, double x2, double lp, double alpha) {
    const double b = full_line_factor(alpha);
    const double strips =
        b / (2.0 * alpha) *
        (std::pow(lp - x1, -2.0 * alpha) + std::pow(lp + x1, -2.0 * alpha));
    const auto band = [&](double y1) {
        const double a = y1 - x1;
        return half_line_integral(a, lp - x2, alpha) + half_line_integral(a, lp + x2, alpha);
    };
    // the integrand has a cusp at y1 = x1; split there
    const double bands = adaptive_simpson(band, -lp, x1, 5e-12, 32) +
                         adaptive_simpson(band, x1, lp, 5e-12, 32);
    return strips + bands;
}

} // namespace

KernelTable::KernelTable(const GridSpec& grid, const FracParams& frac)
    : grid_(grid), frac_(frac) {
    if (!(frac.alpha > 0.0 && frac.alpha < 1.0)) {
        throw std::invalid_argument("KernelTable: alpha must be in (0,1)");
    }
    if (!(frac.c_norm > 0.0)) {
        throw std::invalid_argument("KernelTable: c_norm must be positive");
    }
    const int n = grid.points_per_axis;
    const double h = grid.spacing();
    const double hn = grid.cell_volume();
    const double expo = grid.dimension + 2.0 * frac.alpha;

    if (grid.dimension == 1) {
        offsets_.assign(static_cast<std::size_t>(n), 0.0);
        for (int d = 1; d < n; ++d) {
            offsets_[static_cast<std::size_t>(d)] = hn * std::pow(d * h, -expo);
        }
        conv_ = std::make_unique<ConvolutionPlan>(n, offsets_);
    } else {
        offsets_.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int dy = 0; dy < n; ++dy) {
            for (int dx = 0; dx < n; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const double r2 = (dx * h) * (dx * h) + (dy * h) * (dy * h);
                offsets_[static_cast<std::size_t>(dy) * n + dx] =
                    hn * std::pow(r2, -0.5 * expo);
            }
        }
        conv_ = std::make_unique<ConvolutionPlan>(n, n, offsets_);
    }

    const long count = grid.point_count();
    rowsum_.assign(static_cast<std::size_t>(count), 0.0);
    if (grid.dimension == 1) {
        parallel_for(count, [&](long b, long e) {
            for (long i = b; i < e; ++i) {
                double acc = 0.0;
                for (long j = 0; j < count; ++j) {
                    acc += offsets_[static_cast<std::size_t>(std::labs(i - j))];
                }
                rowsum_[static_cast<std::size_t>(i)] = acc;
            }
        });
    } else {
        parallel_for(count, [&](long b, long e) {
            for (long i = b; i < e; ++i) {
                const int ix = static_cast<int>(i % n);
                const int iy = static_cast<int>(i / n);
                double acc = 0.0;
                for (int jy = 0; jy < n; ++jy) {
                    const std::size_t row = static_cast<std::size_t>(std::abs(iy - jy)) * n;
                    for (int jx = 0; jx < n; ++jx) {
                        acc += offsets_[row + static_cast<std::size_t>(std::abs(ix - jx))];
                    }
                }
                rowsum_[static_cast<std::size_t>(i)] = acc;
            }
        });
    }

    // Tail over the complement of the half-cell-padded box. The padding
    // keeps the integral finite at grid points on the box boundary and
    // matches the cell-midpoint quadrature of the interior pairs.
    const double lp = grid.half_width + 0.5 * h;
    tail_raw_.assign(static_cast<std::size_t>(count), 0.0);
    if (grid.dimension == 1) {
        for (long i = 0; i < count; ++i) {
            const double x = grid.coord(static_cast<int>(i));
            tail_raw_[static_cast<std::size_t>(i)] =
                (std::pow(lp - x, -2.0 * frac.alpha) + std::pow(lp + x, -2.0 * frac.alpha)) /
                (2.0 * frac.alpha);
        }
    } else {
        // Cache by symmetry class (|x1|, |x2| up to swap).
        std::vector<double> cache(static_cast<std::size_t>(2 * n) * (2 * n),
                                  std::numeric_limits<double>::quiet_NaN());
        for (long i = 0; i < count; ++i) {
            const int ix = static_cast<int>(i % n);
            const int iy = static_cast<int>(i / n);
            const int ax = std::abs(2 * ix - (n - 1));
            const int ay = std::abs(2 * iy - (n - 1));
            const int ka = std::max(ax, ay);
            const int kb = std::min(ax, ay);
            const std::size_t key = static_cast<std::size_t>(ka) * (2 * n) + kb;
            if (std::isnan(cache[key])) {
                const double x1 = std::abs(grid.coord(ix));
                const double x2 = std::abs(grid.coord(iy));
                cache[key] = tail_raw_2d(std::max(x1, x2), std::min(x1, x2), lp, frac.alpha);
            }
            tail_raw_[static_cast<std::size_t>(i)] = cache[key];
        }
    }

    memory_bytes_ = (offsets_.size() + rowsum_.size() + tail_raw_.size()) * sizeof(double) +
                    conv_->memory_bytes();
}

double KernelTable::weight_energy(int dx, int dy) const {
    const int adx = std::abs(dx);
    const int ady = std::abs(dy);
    if (grid_.dimension == 1) {
        return offsets_[static_cast<std::size_t>(adx)];
    }
    return offsets_[static_cast<std::size_t>(ady) * grid_.points_per_axis + adx];
}

void KernelTable::check_grid(const ScalarField& u) const {
    if (!u.grid.same_as(grid_)) {
        throw std::invalid_argument("KernelTable: field grid does not match kernel grid");
    }
}

void KernelTable::raw_apply(const ScalarField& u, bool include_tail, bool dense,
                            ScalarField& out) const {
    const long count = grid_.point_count();
    if (dense) {
        const int n = grid_.points_per_axis;
        if (grid_.dimension == 1) {
            parallel_for(count, [&](long b, long e) {
                for (long i = b; i < e; ++i) {
                    const double ui = u[i];
                    double acc = 0.0;
                    for (long j = 0; j < count; ++j) {
                        acc += offsets_[static_cast<std::size_t>(std::labs(i - j))] * (ui - u[j]);
                    }
                    if (include_tail) acc += tail_raw_[static_cast<std::size_t>(i)] * ui;
                    out[i] = acc;
                }
            });
        } else {
            parallel_for(count, [&](long b, long e) {
                for (long i = b; i < e; ++i) {
                    const int ix = static_cast<int>(i % n);
                    const int iy = static_cast<int>(i / n);
                    const double ui = u[i];
                    double acc = 0.0;
                    for (int jy = 0; jy < n; ++jy) {
                        const std::size_t row = static_cast<std::size_t>(std::abs(iy - jy)) * n;
                        const std::size_t base = static_cast<std::size_t>(jy) * n;
                        for (int jx = 0; jx < n; ++jx) {
                            acc += offsets_[row + static_cast<std::size_t>(std::abs(ix - jx))] *
                                   (ui - u.values[base + static_cast<std::size_t>(jx)]);
                        }
                    }
                    if (include_tail) acc += tail_raw_[static_cast<std::size_t>(i)] * ui;
                    out[i] = acc;
                }
            });
        }
    } else {
        conv_->apply(u.values.data(), out.values.data());
        for (long i = 0; i < count; ++i) {
            const std::size_t s = static_cast<std::size_t>(i);
            double acc = u[i] * rowsum_[s] - out[i];
            if (include_tail) acc += tail_raw_[s] * u[i];
            out[i] = acc;
        }
    }
}

ScalarField KernelTable::apply_dense(const ScalarField& u, bool include_tail) const {
    check_grid(u);
    ScalarField out(grid_);
    raw_apply(u, include_tail, true, out);
    const long count = grid_.point_count();
    for (long i = 0; i < count; ++i) out[i] *= frac_.c_norm;
    return out;
}

ScalarField KernelTable::apply_fast(const ScalarField& u, bool include_tail) const {
    check_grid(u);
    ScalarField out(grid_);
    raw_apply(u, include_tail, false, out);
    const long count = grid_.point_count();
    for (long i = 0; i < count; ++i) out[i] *= frac_.c_norm;
    return out;
}

ScalarField KernelTable::apply_raw_fast(const ScalarField& u, bool include_tail) const {
    check_grid(u);
    ScalarField out(grid_);
    raw_apply(u, include_tail, false, out);
    return out;
}

double gagliardo_energy(const KernelTable& kernel, const ScalarField& u) {
    const ScalarField a = kernel.apply_raw_fast(u, true);
    const long count = u.size();
    double acc = 0.0;
    for (long i = 0; i < count; ++i) acc += u[i] * a[i];
    return 2.0 * u.grid.cell_volume() * acc;
}

double dirichlet_pairing(const KernelTable& kernel, const ScalarField& u,
                         const ScalarField& w) {
    if (!u.grid.same_as(w.grid)) {
        throw std::invalid_argument("dirichlet_pairing: field grids do not match");
    }
    const ScalarField a = kernel.apply_raw_fast(u, true);
    const long count = u.size();
    double acc = 0.0;
    for (long i = 0; i < count; ++i) acc += w[i] * a[i];
    return 2.0 * u.grid.cell_volume() * acc;
}

double pv_integral_oracle_1d(const std::function<double(double)>& f, double x,
                             double alpha, double support, double tol) {
    const double c = normalization_constant(1, alpha);
    const double reach = support + std::abs(x) + 1.0;
    const double fx = f(x);
    const auto paired = [&](double r) {
        return (2.0 * fx - f(x + r) - f(x - r)) * std::pow(r, -1.0 - 2.0 * alpha);
    };
    // Second difference below r_core cancels catastrophically in doubles;
    // replace that core by its Taylor value -f''(x) r^(2-2a)/(2-2a).
    const double r_core = 1e-4;
    const double d2 = (f(x + r_core) - 2.0 * fx + f(x - r_core)) / (r_core * r_core);
    const double core = -d2 * std::pow(r_core, 2.0 - 2.0 * alpha) / (2.0 - 2.0 * alpha);
    // Near the singularity the paired integrand behaves like r^(1-2a);
    // the substitution r = t^m with m = 2/(2-2a) makes it O(t) smooth.
    const double m = 2.0 / (2.0 - 2.0 * alpha);
    const auto near_sub = [&](double t) {
        const double r = std::pow(t, m);
        if (!(r > 0.5 * r_core)) return 0.0;
        return paired(r) * m * std::pow(t, m - 1.0);
    };
    const auto evaluate = [&](double r0, double qtol) {
        const double near = adaptive_simpson(near_sub, std::pow(r_core, 1.0 / m),
                                             std::pow(r0, 1.0 / m), qtol, 28);
        // split the远 integral where f(x +- r) hits the support edges; the
        // profile may only be Hoelder there and the kinks stall adaptivity
        std::vector<double> cuts{r0};
        for (double edge : {support - x, support + x}) {
            if (edge > r0 && edge < reach) cuts.push_back(edge);
        }
        cuts.push_back(reach);
        std::sort(cuts.begin(), cuts.end());
        double mid = 0.0;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            mid += adaptive_simpson(paired, cuts[k], cuts[k + 1], qtol, 28);
        }
        const double far = 2.0 * fx * std::pow(reach, -2.0 * alpha) / (2.0 * alpha);
        return core + near + mid + far;
    };
    const double qtol = std::max(tol * 1e-2, 1e-12);
    double r0 = 0.25;
    double prev = evaluate(r0, qtol);
    for (int it = 0; it < 6; ++it) {
        r0 *= 0.5;
        const double cur = evaluate(r0, qtol);
        if (std::abs(cur - prev) <= tol * (1.0 + std::abs(cur))) {
            return c * cur;
        }
        prev = cur;
    }
    return c * prev;
}

} // namespace fracfb
