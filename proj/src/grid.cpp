#include "fracfb/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracfb {

GridSpec build_grid(int dimension, double half_width, int points_per_axis) {
    if (dimension != 1 && dimension != 2) {
        throw std::invalid_argument("build_grid: dimension must be 1 or 2");
    }
    if (points_per_axis < 3) {
        throw std::invalid_argument("build_grid: points_per_axis must be >= 3");
    }
    if (!(half_width > 0.0)) {
        throw std::invalid_argument("build_grid: half_width must be positive");
    }
    return GridSpec{dimension, half_width, points_per_axis};
}

ScalarField ScalarField::from_fn(const GridSpec& g, const std::function<double(Point)>& f) {
    ScalarField out(g);
    const long n = g.point_count();
    for (long i = 0; i < n; ++i) out[i] = f(g.point(i));
    return out;
}

bool ScalarField::all_finite() const {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double point_distance(const Point& a, const Point& b, int dimension) {
    const double dx = a[0] - b[0];
    if (dimension == 1) return std::abs(dx);
    const double dy = a[1] - b[1];
    return std::sqrt(dx * dx + dy * dy);
}

namespace {

bool primitive_contains(const DomainPrimitive& prim, const Point& p, int dim) {
    if (const auto* ball = std::get_if<BallShape>(&prim)) {
        return point_distance(p, ball->center, dim) <= ball->radius;
    }
    const auto& box = std::get<BoxShape>(prim);
    if (p[0] < box.lo[0] || p[0] > box.hi[0]) return false;
    if (dim == 2 && (p[1] < box.lo[1] || p[1] > box.hi[1])) return false;
    return true;
}

double primitive_distance(const DomainPrimitive& prim, const Point& p, int dim) {
    if (const auto* ball = std::get_if<BallShape>(&prim)) {
        return std::max(0.0, point_distance(p, ball->center, dim) - ball->radius);
    }
    const auto& box = std::get<BoxShape>(prim);
    double d2 = 0.0;
    for (int a = 0; a < dim; ++a) {
        const double lo = box.lo[static_cast<std::size_t>(a)];
        const double hi = box.hi[static_cast<std::size_t>(a)];
        const double v = p[static_cast<std::size_t>(a)];
        const double d = std::max({lo - v, 0.0, v - hi});
        d2 += d * d;
    }
    return std::sqrt(d2);
}

// Largest coordinate reach of a primitive, for the truncation-margin check.
double primitive_reach(const DomainPrimitive& prim, int dim) {
    if (const auto* ball = std::get_if<BallShape>(&prim)) {
        double r = std::abs(ball->center[0]) + ball->radius;
        if (dim == 2) r = std::max(r, std::abs(ball->center[1]) + ball->radius);
        return r;
    }
    const auto& box = std::get<BoxShape>(prim);
    double r = std::max(std::abs(box.lo[0]), std::abs(box.hi[0]));
    if (dim == 2) r = std::max({r, std::abs(box.lo[1]), std::abs(box.hi[1])});
    return r;
}

} // namespace

bool DomainSpec::contains(const Point& p, int dimension) const {
    for (const auto& prim : primitives) {
        if (primitive_contains(prim, p, dimension)) return true;
    }
    return false;
}

double DomainSpec::distance(const Point& p, int dimension) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& prim : primitives) {
        best = std::min(best, primitive_distance(prim, p, dimension));
    }
    return best;
}

void DomainSpec::validate(const GridSpec& grid) const {
    if (primitives.empty()) {
        throw std::invalid_argument("DomainSpec: at least one primitive required");
    }
    if (primitives.size() > 4) {
        throw std::invalid_argument("DomainSpec: at most 4 primitives supported");
    }
    const double margin = 4.0 * grid.spacing();
    for (const auto& prim : primitives) {
        if (primitive_reach(prim, grid.dimension) > grid.half_width - margin) {
            throw std::invalid_argument(
                "DomainSpec: domain too close to the computational box boundary "
                "(needs a 4h truncation margin)");
        }
        if (const auto* box = std::get_if<BoxShape>(&prim)) {
            for (int a = 0; a < grid.dimension; ++a) {
                if (!(box->lo[static_cast<std::size_t>(a)] < box->hi[static_cast<std::size_t>(a)])) {
                    throw std::invalid_argument("DomainSpec: box primitive has empty extent");
                }
            }
        } else {
            if (!(std::get<BallShape>(prim).radius > 0.0)) {
                throw std::invalid_argument("DomainSpec: ball primitive needs positive radius");
            }
        }
    }
}

double ObstacleSpec::evaluate(const Point& p, int dimension) const {
    const double d = point_distance(p, center, dimension);
    if (d >= radius) return 0.0;
    const double s2 = (d / radius) * (d / radius);
    return amplitude * std::exp(1.0 - 1.0 / (1.0 - s2));
}

void ObstacleSpec::validate(const DomainSpec& domain, const GridSpec& grid) const {
    if (!(amplitude > 0.0)) {
        throw std::invalid_argument("ObstacleSpec: amplitude must be positive");
    }
    if (!(radius > 0.0)) {
        throw std::invalid_argument("ObstacleSpec: radius must be positive");
    }
    // The closed support ball must sit inside a single domain primitive.
    bool contained = false;
    for (const auto& prim : domain.primitives) {
        if (const auto* ball = std::get_if<BallShape>(&prim)) {
            if (point_distance(center, ball->center, grid.dimension) + radius <= ball->radius) {
                contained = true;
                break;
            }
        } else {
            const auto& box = std::get<BoxShape>(prim);
            bool inside = true;
            for (int a = 0; a < grid.dimension; ++a) {
                const std::size_t ai = static_cast<std::size_t>(a);
                if (center[ai] - radius < box.lo[ai] || center[ai] + radius > box.hi[ai]) {
                    inside = false;
                    break;
                }
            }
            if (inside) {
                contained = true;
                break;
            }
        }
    }
    if (!contained) {
        throw std::invalid_argument("ObstacleSpec: support ball must be contained in the domain");
    }
}

ScalarField sample_obstacle(const ObstacleSpec& spec, const DomainSpec& domain,
                            const GridSpec& grid) {
    spec.validate(domain, grid);
    return ScalarField::from_fn(
        grid, [&](Point p) { return spec.evaluate(p, grid.dimension); });
}

ScalarField indicator_omega(const DomainSpec& domain, const GridSpec& grid) {
    domain.validate(grid);
    return ScalarField::from_fn(grid, [&](Point p) {
        return domain.contains(p, grid.dimension) ? 1.0 : 0.0;
    });
}

std::vector<long> ball_indices(const GridSpec& grid, const Point& center, double radius) {
    if (!(radius > 0.0)) {
        throw std::invalid_argument("ball_indices: radius must be positive");
    }
    std::vector<long> out;
    const long n = grid.point_count();
    for (long i = 0; i < n; ++i) {
        if (point_distance(grid.point(i), center, grid.dimension) <= radius) {
            out.push_back(i);
        }
    }
    return out;
}

double complement_measure(const ScalarField& chi_omega) {
    const double cell = chi_omega.grid.cell_volume();
    double acc = 0.0;
    for (double v : chi_omega.values) {
        if (v == 0.0) acc += cell;
    }
    return acc;
}

} // namespace fracfb
