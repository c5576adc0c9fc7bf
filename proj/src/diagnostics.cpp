#include "fracfb/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracfb {

BoundsReport bounds_check(const ScalarField& u, const ScalarField& phi) {
    BoundsReport r;
    r.min_u = std::numeric_limits<double>::infinity();
    r.max_u = -std::numeric_limits<double>::infinity();
    for (double v : u.values) {
        r.min_u = std::min(r.min_u, v);
        r.max_u = std::max(r.max_u, v);
    }
    const double cap = phi.max_abs();
    r.lower_violation = std::max(0.0, -r.min_u);
    r.upper_violation = std::max(0.0, r.max_u - cap);
    return r;
}

double positivity_volume(const ScalarField& u, const ScalarField& chi_omega,
                         double tau_pos) {
    if (!(tau_pos >= 0.0)) {
        throw std::invalid_argument("positivity_volume: tau_pos must be non-negative");
    }
    const double cell = u.grid.cell_volume();
    long count = 0;
    for (long i = 0; i < u.size(); ++i) {
        if (chi_omega[i] == 0.0 && u[i] > tau_pos) ++count;
    }
    return count * cell;
}

HolderEstimate holder_seminorm(const ScalarField& u, double lambda, int stride) {
    if (!(lambda > 0.0 && lambda <= 1.0)) {
        throw std::invalid_argument("holder_seminorm: lambda must be in (0,1]");
    }
    if (stride < 1) throw std::invalid_argument("holder_seminorm: stride must be >= 1");

    HolderEstimate est;
    est.lambda = lambda;
    const GridSpec& g = u.grid;
    std::vector<long> sample;
    if (g.dimension == 1) {
        for (int i = 0; i < g.points_per_axis; i += stride) sample.push_back(i);
    } else {
        for (int iy = 0; iy < g.points_per_axis; iy += stride) {
            for (int ix = 0; ix < g.points_per_axis; ix += stride) {
                sample.push_back(g.index(ix, iy));
            }
        }
    }
    const double hmin = g.spacing() * (1.0 - 1e-12);
    for (std::size_t a = 0; a < sample.size(); ++a) {
        const Point pa = g.point(sample[a]);
        const double ua = u[sample[a]];
        for (std::size_t b = a + 1; b < sample.size(); ++b) {
            const double d = point_distance(pa, g.point(sample[b]), g.dimension);
            if (d < hmin) continue;
            ++est.pair_count;
            const double ratio = std::abs(ua - u[sample[b]]) / std::pow(d, lambda);
            est.seminorm = std::max(est.seminorm, ratio);
        }
    }
    return est;
}

namespace {

// Segment length of the tau-level set inside one 2D cell (marching squares
// with linear interpolation; saddles resolved by the cell-center average).
double cell_contour_length(double v00, double v10, double v11, double v01, double tau,
                           double h) {
    const bool b00 = v00 > tau, b10 = v10 > tau, b11 = v11 > tau, b01 = v01 > tau;
    const int code = (b00 ? 1 : 0) | (b10 ? 2 : 0) | (b11 ? 4 : 0) | (b01 ? 8 : 0);
    if (code == 0 || code == 15) return 0.0;

    const auto cross = [tau](double a, double b) { return (tau - a) / (b - a); };
    // edge parameters: bottom (00->10), right (10->11), top (01->11), left (00->01)
    const double tb = (b00 != b10) ? cross(v00, v10) : -1.0;
    const double tr = (b10 != b11) ? cross(v10, v11) : -1.0;
    const double tt = (b01 != b11) ? cross(v01, v11) : -1.0;
    const double tl = (b00 != b01) ? cross(v00, v01) : -1.0;

    const Point pb{tb, 0.0};
    const Point pr{1.0, tr};
    const Point pt{tt, 1.0};
    const Point pl{0.0, tl};
    const auto seg = [h](const Point& a, const Point& b2) {
        const double dx = a[0] - b2[0];
        const double dy = a[1] - b2[1];
        return h * std::sqrt(dx * dx + dy * dy);
    };

    switch (code) {
        case 1: case 14: return seg(pb, pl);
        case 2: case 13: return seg(pb, pr);
        case 4: case 11: return seg(pr, pt);
        case 8: case 7:  return seg(pt, pl);
        case 3: case 12: return seg(pl, pr);
        case 6: case 9:  return seg(pb, pt);
        case 5: case 10: {
            const double center = 0.25 * (v00 + v10 + v11 + v01);
            const bool center_pos = center > tau;
            // connect so the center matches its side
            if ((code == 5) == center_pos) {
                return seg(pb, pr) + seg(pt, pl);
            }
            return seg(pb, pl) + seg(pr, pt);
        }
        default: return 0.0;
    }
}

} // namespace

FreeBoundaryExtract free_boundary_extract(const ScalarField& u, double tau_pos,
                                          const DomainSpec* domain) {
    FreeBoundaryExtract out;
    out.tau = tau_pos;
    const GridSpec& g = u.grid;
    const int n = g.points_per_axis;

    std::vector<char> is_point(static_cast<std::size_t>(g.point_count()), 0);
    const auto add_face = [&](long a, long b) {
        const bool pa = u[a] > tau_pos;
        const long pos = pa ? a : b;
        const long neg = pa ? b : a;
        out.faces.push_back(BoundaryFace{pos, neg});
        is_point[static_cast<std::size_t>(pos)] = 1;
    };

    bool any_nonpositive = false;
    for (long i = 0; i < g.point_count(); ++i) {
        if (!(u[i] > tau_pos)) any_nonpositive = true;
    }

    if (g.dimension == 1) {
        for (int i = 0; i + 1 < n; ++i) {
            if ((u[i] > tau_pos) != (u[i + 1] > tau_pos)) add_face(i, i + 1);
        }
        out.measure_estimate = static_cast<double>(out.faces.size());
    } else {
        for (int iy = 0; iy < n; ++iy) {
            for (int ix = 0; ix < n; ++ix) {
                const long a = g.index(ix, iy);
                if (ix + 1 < n) {
                    const long b = g.index(ix + 1, iy);
                    if ((u[a] > tau_pos) != (u[b] > tau_pos)) add_face(a, b);
                }
                if (iy + 1 < n) {
                    const long b = g.index(ix, iy + 1);
                    if ((u[a] > tau_pos) != (u[b] > tau_pos)) add_face(a, b);
                }
            }
        }
        double length = 0.0;
        const double h = g.spacing();
        for (int iy = 0; iy + 1 < n; ++iy) {
            for (int ix = 0; ix + 1 < n; ++ix) {
                length += cell_contour_length(u[g.index(ix, iy)], u[g.index(ix + 1, iy)],
                                              u[g.index(ix + 1, iy + 1)],
                                              u[g.index(ix, iy + 1)], tau_pos, h);
            }
        }
        out.measure_estimate = length;
    }

    if (!any_nonpositive) out.everywhere_positive_warning = true;

    std::vector<long> complement_points;
    if (domain != nullptr) {
        for (long i = 0; i < g.point_count(); ++i) {
            if (!domain->contains(g.point(i), g.dimension)) complement_points.push_back(i);
        }
    }
    for (long i = 0; i < g.point_count(); ++i) {
        if (!is_point[static_cast<std::size_t>(i)]) continue;
        BoundaryPoint p;
        p.index = i;
        const Point x = g.point(i);
        if (domain != nullptr) {
            p.interior = domain->contains(x, g.dimension);
            if (p.interior) {
                // distance to the domain boundary seen from inside,
                // measured to the nearest exterior grid point
                double best = std::numeric_limits<double>::infinity();
                for (long j : complement_points) {
                    best = std::min(best, point_distance(x, g.point(j), g.dimension));
                }
                p.dist_omega = best;
            } else {
                p.dist_omega = domain->distance(x, g.dimension);
            }
        }
        const double reach =
            g.dimension == 1 ? std::abs(x[0]) : std::max(std::abs(x[0]), std::abs(x[1]));
        p.dist_box = g.half_width - reach;
        out.points.push_back(p);
    }
    return out;
}

std::vector<GrowthFit> nondegeneracy_scan(const ScalarField& u,
                                          const FreeBoundaryExtract& boundary,
                                          const std::vector<double>& radii, double alpha) {
    if (radii.size() < 3) {
        throw std::invalid_argument("nondegeneracy_scan: need at least 3 radii for a fit");
    }
    const GridSpec& g = u.grid;
    const double h = g.spacing();
    std::vector<GrowthFit> out;
    out.reserve(boundary.points.size());

    for (const BoundaryPoint& bp : boundary.points) {
        GrowthFit fit;
        fit.index = bp.index;
        fit.interior = bp.interior;
        const Point x0 = g.point(bp.index);
        const double dist = std::min(bp.dist_omega, bp.dist_box);

        std::vector<double> lr, ls;
        double min_ratio = std::numeric_limits<double>::infinity();
        for (double r : radii) {
            if (!(r > 2.0 * h) || !(r <= 0.5 * dist)) continue;
            double sup = 0.0;
            for (long j : ball_indices(g, x0, r)) sup = std::max(sup, u[j]);
            if (!(sup > 0.0)) continue;
            lr.push_back(std::log(r));
            ls.push_back(std::log(sup));
            min_ratio = std::min(min_ratio, sup / std::pow(r, alpha));
        }
        if (lr.size() < 3) {
            fit.defined = false;
            out.push_back(fit);
            continue;
        }
        double mx = 0.0, my = 0.0;
        for (std::size_t k = 0; k < lr.size(); ++k) {
            mx += lr[k];
            my += ls[k];
        }
        mx /= static_cast<double>(lr.size());
        my /= static_cast<double>(lr.size());
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t k = 0; k < lr.size(); ++k) {
            sxx += (lr[k] - mx) * (lr[k] - mx);
            sxy += (lr[k] - mx) * (ls[k] - my);
        }
        fit.defined = sxx > 0.0;
        fit.slope = fit.defined ? sxy / sxx : 0.0;
        fit.min_ratio = min_ratio;
        out.push_back(fit);
    }
    return out;
}

std::vector<DensityResult> density_check(const ScalarField& u,
                                         const FreeBoundaryExtract& boundary,
                                         const std::vector<double>& radii, double tau_pos) {
    const GridSpec& g = u.grid;
    const double h = g.spacing();
    const double cell = g.cell_volume();
    std::vector<DensityResult> out;
    out.reserve(boundary.points.size());

    for (const BoundaryPoint& bp : boundary.points) {
        DensityResult res;
        res.index = bp.index;
        const Point x0 = g.point(bp.index);
        double min_pos = std::numeric_limits<double>::infinity();
        double min_zero = std::numeric_limits<double>::infinity();
        bool any = false;
        for (double r : radii) {
            if (!(r >= 3.0 * h)) continue;
            any = true;
            long pos = 0, zero = 0;
            for (long j : ball_indices(g, x0, r)) {
                if (u[j] > tau_pos) {
                    ++pos;
                } else {
                    ++zero;
                }
            }
            const double rn = g.dimension == 1 ? r : r * r;
            min_pos = std::min(min_pos, pos * cell / rn);
            min_zero = std::min(min_zero, zero * cell / rn);
        }
        if (!any) {
            res.flagged = true;
            out.push_back(res);
            continue;
        }
        res.min_pos_density = min_pos;
        res.min_zero_density = min_zero;
        res.flagged = !(min_pos > 0.0) || !(min_zero > 0.0);
        out.push_back(res);
    }
    return out;
}

HarnackResult harnack_ratio(const ScalarField& u, const ScalarField& phi,
                            const ScalarField& chi_omega, double tau_pos, double shrink,
                            double contact_tol) {
    if (!(shrink > 0.0 && shrink < 1.0)) {
        throw std::invalid_argument("harnack_ratio: shrink must be in (0,1)");
    }
    const GridSpec& g = u.grid;
    const long count = g.point_count();
    std::vector<char> in_d(static_cast<std::size_t>(count), 0);
    std::vector<long> d_list, dc_list;
    for (long i = 0; i < count; ++i) {
        const bool inside = chi_omega[i] != 0.0;
        const bool member = inside ? (u[i] > phi[i] + contact_tol) : (u[i] > tau_pos);
        in_d[static_cast<std::size_t>(i)] = member ? 1 : 0;
        (member ? d_list : dc_list).push_back(i);
    }
    if (d_list.empty()) {
        throw std::invalid_argument("harnack_ratio: positivity region D is empty");
    }

    // Distance transform by brute force; grids here are desk-scale.
    double inradius = 0.0;
    std::vector<double> dist(d_list.size(), std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < d_list.size(); ++k) {
        const Point p = g.point(d_list[k]);
        double best = std::numeric_limits<double>::infinity();
        for (long j : dc_list) {
            best = std::min(best, point_distance(p, g.point(j), g.dimension));
        }
        // distance to the box boundary also bounds the inscribed ball
        const double reach =
            g.dimension == 1 ? std::abs(p[0]) : std::max(std::abs(p[0]), std::abs(p[1]));
        best = std::min(best, g.half_width - reach + g.spacing());
        dist[k] = best;
        inradius = std::max(inradius, best);
    }

    const double margin = shrink * inradius;
    HarnackResult res;
    res.sup = 0.0;
    res.inf = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < d_list.size(); ++k) {
        if (dist[k] >= margin) {
            ++res.region_size;
            res.sup = std::max(res.sup, u[d_list[k]]);
            res.inf = std::min(res.inf, u[d_list[k]]);
        }
    }
    if (res.region_size == 0) {
        throw std::invalid_argument("harnack_ratio: eroded region D' is empty");
    }
    if (!(res.inf > 0.0)) {
        res.infinite = true;
        res.ratio = std::numeric_limits<double>::infinity();
    } else {
        res.ratio = res.sup / res.inf;
    }
    return res;
}

} // namespace fracfb
