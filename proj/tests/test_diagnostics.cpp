#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "fracfb/diagnostics.hpp"
#include "fracfb/grid.hpp"
#include "oracles.hpp"

using namespace fracfb;

TEST_CASE("bounds_check reports violations") {
    const GridSpec g = build_grid(1, 2.0, 33);
    DomainSpec domain;
    domain.primitives.push_back(BallShape{{0.0, 0.0}, 1.0});
    ObstacleSpec obs{1.0, {0.0, 0.0}, 0.5};
    const ScalarField phi = sample_obstacle(obs, domain, g);

    const BoundsReport ok = bounds_check(phi, phi);
    CHECK(ok.lower_violation == 0.0);
    CHECK(ok.upper_violation == 0.0);

    ScalarField shifted = phi;
    for (long i = 0; i < shifted.size(); ++i) shifted[i] += 0.25;
    const BoundsReport up = bounds_check(shifted, phi);
    CHECK(up.upper_violation == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(up.lower_violation == 0.0);

    ScalarField neg = phi;
    neg[0] = -0.125;
    const BoundsReport lo = bounds_check(neg, phi);
    CHECK(lo.lower_violation == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("positivity volume counts cells outside the domain") {
    const GridSpec g = build_grid(1, 2.0, 401);
    DomainSpec domain;
    domain.primitives.push_back(BallShape{{0.0, 0.0}, 1.0});
    const ScalarField chi = indicator_omega(domain, g);

    CHECK(positivity_volume(ScalarField(g, 0.0), chi, 1e-8) == 0.0);

    // u = 1 everywhere: volume of box minus the counted domain cells
    const ScalarField one(g, 1.0);
    const double vol = positivity_volume(one, chi, 1e-8);
    CHECK(vol == doctest::Approx(complement_measure(chi)).epsilon(1e-14));

    // refinement study: the measured volume of a fixed smooth field settles
    double prev_diff = std::numeric_limits<double>::infinity();
    double prev = -1.0;
    for (int n : {101, 201, 401}) {
        const GridSpec gr = build_grid(1, 2.0, n);
        const ScalarField chir = indicator_omega(domain, gr);
        const ScalarField f = ScalarField::from_fn(gr, [](Point p) {
            return std::max(0.0, 1.4 - std::abs(p[0]));
        });
        const double v = positivity_volume(f, chir, 1e-8);
        if (prev >= 0.0) {
            const double diff = std::abs(v - prev);
            CHECK(diff <= prev_diff + 1e-12);
            prev_diff = diff;
        }
        prev = v;
    }
}

TEST_CASE("holder seminorm: constants, closed-form field, stride-1 brute force") {
    const GridSpec g = build_grid(1, 1.0, 81);
    CHECK(holder_seminorm(ScalarField(g, 3.5), 0.5, 1).seminorm == 0.0);

    // u = |x|^alpha: the alpha-seminorm is 1 at the minimal pair (0, h)
    const double alpha = 0.5;
    const ScalarField u = ScalarField::from_fn(
        g, [alpha](Point p) { return std::pow(std::abs(p[0]), alpha); });
    const HolderEstimate est = holder_seminorm(u, alpha, 1);
    CHECK(est.seminorm == doctest::Approx(1.0).epsilon(1e-6));

    // the (alpha+1)/2 seminorm grows like h^{alpha-lambda} under refinement
    const double lambda = 0.75;
    double prev = 0.0;
    for (int n : {51, 401}) {
        const GridSpec gr = build_grid(1, 1.0, n);
        const ScalarField ur = ScalarField::from_fn(
            gr, [alpha](Point p) { return std::pow(std::abs(p[0]), alpha); });
        const double s = holder_seminorm(ur, lambda, 1).seminorm;
        if (prev > 0.0) {
            CHECK(s >= 1.5 * prev); // 8x refinement: expect 8^{1/4} = 1.68
        }
        prev = s;
    }

    // stride-1 equals an independent all-pairs maximum on a tiny grid
    const GridSpec tiny = build_grid(1, 1.0, 9);
    testutil::Rng rng(7);
    const ScalarField r = testutil::random_field(tiny, rng, -1.0, 1.0);
    double brute = 0.0;
    for (long i = 0; i < r.size(); ++i) {
        for (long j = i + 1; j < r.size(); ++j) {
            const double d = point_distance(tiny.point(i), tiny.point(j), 1);
            brute = std::max(brute, std::abs(r[i] - r[j]) / std::pow(d, 0.6));
        }
    }
    CHECK(holder_seminorm(r, 0.6, 1).seminorm == brute);

    CHECK_THROWS_AS(holder_seminorm(r, 1.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(holder_seminorm(r, 0.5, 0), std::invalid_argument);
}

TEST_CASE("free boundary extraction in 1D") {
    const GridSpec g = build_grid(1, 2.0, 201);
    const ScalarField u = ScalarField::from_fn(g, [](Point p) {
        return std::max(0.0, 1.0 - std::abs(p[0]));
    });
    const FreeBoundaryExtract fb = free_boundary_extract(u, 1e-8);
    CHECK(fb.faces.size() == 2);
    CHECK(fb.measure_estimate == 2.0);
    CHECK_FALSE(fb.everywhere_positive_warning);
    for (const BoundaryFace& f : fb.faces) {
        CHECK(u[f.positive_cell] > fb.tau);
        CHECK_FALSE(u[f.nonpositive_cell] > fb.tau);
    }

    const FreeBoundaryExtract empty = free_boundary_extract(ScalarField(g, 0.0), 1e-8);
    CHECK(empty.faces.empty());
    CHECK(empty.measure_estimate == 0.0);

    const FreeBoundaryExtract full = free_boundary_extract(ScalarField(g, 1.0), 1e-8);
    CHECK(full.faces.empty());
    CHECK(full.everywhere_positive_warning);
}

TEST_CASE("disk boundary measure is close to the true perimeter") {
    const GridSpec g = build_grid(2, 2.0, 201);
    const double radius = 0.7;
    const ScalarField u = ScalarField::from_fn(g, [radius](Point p) {
        const double r = std::sqrt(p[0] * p[0] + p[1] * p[1]);
        return std::max(0.0, radius * radius - r * r);
    });
    const FreeBoundaryExtract fb = free_boundary_extract(u, 1e-12);
    const double exact = 2.0 * M_PI * radius;
    CHECK(std::abs(fb.measure_estimate - exact) / exact <= 0.15);
    // an interior level set interpolates cleanly: the contour machinery is
    // near-exact when the crossing is not pinned to the support edge
    const double level = 0.2 * radius * radius;
    const double r_level = std::sqrt(radius * radius - level);
    const FreeBoundaryExtract fbl = free_boundary_extract(u, level);
    CHECK(std::abs(fbl.measure_estimate - 2.0 * M_PI * r_level) /
              (2.0 * M_PI * r_level) <=
          0.002);
    // every face separates a positive from a non-positive cell
    for (const BoundaryFace& f : fb.faces) {
        CHECK(u[f.positive_cell] > fb.tau);
        CHECK_FALSE(u[f.nonpositive_cell] > fb.tau);
    }
}

TEST_CASE("nondegeneracy scan on the closed-form growth field") {
    const GridSpec g = build_grid(1, 2.0, 401);
    const double alpha = 0.5;
    const double x0 = g.coord(200); // exact grid point at 0
    CHECK(x0 == 0.0);
    const ScalarField u = ScalarField::from_fn(
        g, [alpha](Point p) { return std::pow(std::abs(p[0]), alpha); });

    FreeBoundaryExtract fb;
    fb.tau = 1e-12;
    BoundaryPoint bp;
    bp.index = 200;
    bp.interior = false;
    bp.dist_omega = 10.0; // isolate the radius filter to the box distance
    bp.dist_box = 2.0;
    fb.points.push_back(bp);

    // radii snapped to grid distances plus half a cell keep the discrete
    // sup exactly on the power law
    const double h = g.spacing();
    std::vector<double> radii;
    for (int m : {20, 40, 80, 160}) radii.push_back(m * h + 0.5 * h);
    const std::vector<GrowthFit> fits = nondegeneracy_scan(u, fb, radii, alpha);
    REQUIRE(fits.size() == 1);
    CHECK(fits[0].defined);
    CHECK(std::abs(fits[0].slope - alpha) <= 1e-2);
    CHECK(fits[0].min_ratio > 0.0);

    // flat-zero neighborhood comes back flagged
    const ScalarField zero(g, 0.0);
    const std::vector<GrowthFit> none = nondegeneracy_scan(zero, fb, radii, alpha);
    CHECK_FALSE(none[0].defined);

    CHECK_THROWS_AS(nondegeneracy_scan(u, fb, {0.1, 0.2}, alpha), std::invalid_argument);

    // scaling the field shifts the log-log intercept, not the slope
    ScalarField u4 = u;
    for (double& v : u4.values) v *= 4.0;
    const std::vector<GrowthFit> fits4 = nondegeneracy_scan(u4, fb, radii, alpha);
    CHECK(std::abs(fits4[0].slope - fits[0].slope) <= 1e-10);
}

TEST_CASE("density check: half-space field and interior point") {
    const GridSpec g = build_grid(1, 2.0, 401);
    const ScalarField u =
        ScalarField::from_fn(g, [](Point p) { return std::max(p[0], 0.0); });
    FreeBoundaryExtract fb;
    fb.tau = 1e-12;
    BoundaryPoint bp;
    bp.index = 200; // x = 0
    fb.points.push_back(bp);

    const double h = g.spacing();
    std::vector<double> radii;
    for (int m : {20, 40, 80}) radii.push_back(m * h + 0.5 * h);
    const std::vector<DensityResult> res = density_check(u, fb, radii, 1e-12);
    REQUIRE(res.size() == 1);
    CHECK_FALSE(res[0].flagged);
    // both densities approximate the half-ball ratio |B_r|/(2 r^n) = 1
    CHECK(res[0].min_pos_density == doctest::Approx(1.0).epsilon(0.08));
    CHECK(res[0].min_zero_density == doctest::Approx(1.0).epsilon(0.08));

    // strictly positive neighborhood: the zero-set density vanishes
    const ScalarField one(g, 1.0);
    const std::vector<DensityResult> flat = density_check(one, fb, radii, 1e-12);
    CHECK(flat[0].flagged);
    CHECK(flat[0].min_zero_density == 0.0);
}

TEST_CASE("harnack ratio: constants, zeros, exact scale invariance") {
    const GridSpec g = build_grid(1, 2.0, 201);
    DomainSpec domain;
    domain.primitives.push_back(BallShape{{0.0, 0.0}, 1.0});
    const ScalarField chi = indicator_omega(domain, g);
    const ScalarField phi(g, 0.0);

    // positive constant on D: ratio exactly 1
    const ScalarField c(g, 0.7);
    const HarnackResult one = harnack_ratio(c, phi, chi, 1e-8, 0.25);
    CHECK_FALSE(one.infinite);
    CHECK(one.ratio == 1.0);

    // interior zero inside D': flagged infinite
    ScalarField dip = c;
    dip[100] = 0.0;
    // u > phi + tol fails only at the dip; the point stays inside D'?? no:
    // membership needs u > tol so the dip point leaves D and the erosion
    // keeps a positive inf. Build instead a field positive everywhere with
    // a zero deep inside by lowering phi membership threshold.
    const HarnackResult dipres = harnack_ratio(dip, phi, chi, -1.0, 0.25, -1.0);
    CHECK(dipres.infinite);

    // exact invariance under scaling by a power of two
    const GridSpec g2 = build_grid(1, 2.0, 101);
    const ScalarField chi2 = indicator_omega(domain, g2);
    const ScalarField phi2(g2, 0.0);
    const ScalarField f = ScalarField::from_fn(g2, [](Point p) {
        return 0.2 + std::exp(-p[0] * p[0]);
    });
    ScalarField f4 = f;
    for (double& v : f4.values) v *= 4.0;
    const HarnackResult a = harnack_ratio(f, phi2, chi2, 1e-8, 0.3);
    const HarnackResult b = harnack_ratio(f4, phi2, chi2, 1e-8, 0.3);
    CHECK(a.ratio == b.ratio);

    // empty region throws
    CHECK_THROWS_AS(harnack_ratio(ScalarField(g, 0.0), phi, chi, 1e-8, 0.25),
                    std::invalid_argument);
    CHECK_THROWS_AS(harnack_ratio(c, phi, chi, 1e-8, 1.5), std::invalid_argument);
}
