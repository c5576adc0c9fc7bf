// Uniform truncated grids, scalar fields, and analytic geometry for the
// domain and the obstacle bump.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace fracfb {

using Point = std::array<double, 2>; // y unused in 1D

// Uniform grid on [-L, L]^n, n in {1, 2}, with N points per axis and
// spacing h = 2L/(N-1). Coordinates are computed as (2i - (N-1)) * L/(N-1)
// so that mirrored indices give exactly negated coordinates.
struct GridSpec {
    int dimension = 1;
    double half_width = 1.0;
    int points_per_axis = 3;

    double spacing() const { return 2.0 * half_width / (points_per_axis - 1); }
    long point_count() const {
        long n = points_per_axis;
        return dimension == 1 ? n : n * n;
    }
    double cell_volume() const {
        const double h = spacing();
        return dimension == 1 ? h : h * h;
    }
    double coord(int i) const {
        return (2.0 * i - (points_per_axis - 1)) * (half_width / (points_per_axis - 1));
    }
    Point point(long idx) const {
        if (dimension == 1) return {coord(static_cast<int>(idx)), 0.0};
        const int n = points_per_axis;
        return {coord(static_cast<int>(idx % n)), coord(static_cast<int>(idx / n))};
    }
    long index(int ix, int iy) const {
        return dimension == 1 ? ix : static_cast<long>(iy) * points_per_axis + ix;
    }
    bool same_as(const GridSpec& o) const {
        return dimension == o.dimension && half_width == o.half_width &&
               points_per_axis == o.points_per_axis;
    }
};

GridSpec build_grid(int dimension, double half_width, int points_per_axis);

struct ScalarField {
    GridSpec grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& g, double fill = 0.0)
        : grid(g), values(static_cast<std::size_t>(g.point_count()), fill) {}

    double& operator[](long i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](long i) const { return values[static_cast<std::size_t>(i)]; }
    long size() const { return static_cast<long>(values.size()); }

    static ScalarField from_fn(const GridSpec& g, const std::function<double(Point)>& f);
    bool all_finite() const;
    double max_abs() const;
};

struct BallShape {
    Point center{0.0, 0.0};
    double radius = 1.0;
};
struct BoxShape {
    Point lo{0.0, 0.0};
    Point hi{0.0, 0.0};
};
using DomainPrimitive = std::variant<BallShape, BoxShape>;

// Union of at most 4 primitives, all strictly inside the computational box
// with a 4h truncation margin.
struct DomainSpec {
    std::vector<DomainPrimitive> primitives;

    bool contains(const Point& p, int dimension) const;
    // Euclidean distance to the set (0 inside).
    double distance(const Point& p, int dimension) const;
    void validate(const GridSpec& grid) const; // throws on margin violation
};

// Smooth bump amplitude * exp(1 - 1/(1 - |x-c|^2/r^2)) on B_r(c), 0 outside.
struct ObstacleSpec {
    double amplitude = 1.0;
    Point center{0.0, 0.0};
    double radius = 0.5;

    double evaluate(const Point& p, int dimension) const;
    void validate(const DomainSpec& domain, const GridSpec& grid) const;
};

ScalarField sample_obstacle(const ObstacleSpec& spec, const DomainSpec& domain,
                            const GridSpec& grid);

// 0/1 indicator of the domain at the grid points.
ScalarField indicator_omega(const DomainSpec& domain, const GridSpec& grid);

// All grid indices with |x_i - center| <= radius. May be empty.
std::vector<long> ball_indices(const GridSpec& grid, const Point& center, double radius);

double point_distance(const Point& a, const Point& b, int dimension);

// Counted cell measure of {indicator == 0} (the domain complement inside
// the box), used to validate reachability of the volume target.
double complement_measure(const ScalarField& chi_omega);

} // namespace fracfb
