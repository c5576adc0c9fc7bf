#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fracfb/grid.hpp"
#include "oracles.hpp"

using namespace fracfb;

TEST_CASE("build_grid produces exact spacing and points") {
    const GridSpec g = build_grid(1, 2.0, 5);
    CHECK(g.spacing() == 1.0);
    CHECK(g.coord(0) == -2.0);
    CHECK(g.coord(1) == -1.0);
    CHECK(g.coord(2) == 0.0);
    CHECK(g.coord(3) == 1.0);
    CHECK(g.coord(4) == 2.0);

    const GridSpec g2 = build_grid(2, 1.0, 3);
    CHECK(g2.point_count() == 9);
    CHECK(g2.spacing() == 1.0);
}

TEST_CASE("build_grid rejects bad arguments") {
    CHECK_THROWS_AS(build_grid(1, 1.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(3, 1.0, 9), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(0, 1.0, 9), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(1, -1.0, 9), std::invalid_argument);
}

TEST_CASE("grid coordinates negate exactly under index mirroring") {
    for (int n : {4, 5, 33, 100}) {
        const GridSpec g = build_grid(1, 1.7, n);
        for (int i = 0; i < n; ++i) {
            CHECK(g.coord(n - 1 - i) == -g.coord(i));
        }
    }
}

TEST_CASE("obstacle bump values") {
    DomainSpec domain;
    domain.primitives.push_back(BallShape{{0.0, 0.0}, 1.0});
    const GridSpec g = build_grid(1, 2.0, 401);
    ObstacleSpec obs{1.0, {0.0, 0.0}, 0.5};

    CHECK(obs.evaluate({0.0, 0.0}, 1) == 1.0);
    CHECK(obs.evaluate({0.5, 0.0}, 1) == 0.0);
    CHECK(obs.evaluate({0.7, 0.0}, 1) == 0.0);
    // value at half radius: exp(1 - 1/(1 - 1/4)) = exp(-1/3)
    CHECK(obs.evaluate({0.25, 0.0}, 1) ==
          doctest::Approx(0.71653131057378925).epsilon(1e-14));

    const ScalarField phi = sample_obstacle(obs, domain, g);
    for (long i = 0; i < g.point_count(); ++i) {
        CHECK(phi[i] >= 0.0);
    }
}

TEST_CASE("obstacle containment is enforced") {
    DomainSpec domain;
    domain.primitives.push_back(BallShape{{0.0, 0.0}, 1.0});
    const GridSpec g = build_grid(1, 2.0, 101);
    ObstacleSpec too_wide{1.0, {0.5, 0.0}, 0.8};
    CHECK_THROWS_AS(sample_obstacle(too_wide, domain, g), std::invalid_argument);
    ObstacleSpec fits{1.0, {0.2, 0.0}, 0.5};
    CHECK_NOTHROW(sample_obstacle(fits, domain, g));
}

TEST_CASE("indicator of a ball and a union") {
    const GridSpec g = build_grid(2, 4.0, 33);
    DomainSpec domain;
    domain.primitives.push_back(BallShape{{0.0, 0.0}, 1.0});
    domain.primitives.push_back(BallShape{{2.0, 0.0}, 1.0});

    const ScalarField chi = indicator_omega(domain, g);
    const auto at = [&](double x, double y) {
        const double h = g.spacing();
        const int ix = static_cast<int>(std::lround((x + g.half_width) / h));
        const int iy = static_cast<int>(std::lround((y + g.half_width) / h));
        return chi[g.index(ix, iy)];
    };
    CHECK(at(0.0, 0.0) == 1.0);
    CHECK(at(1.5, 0.0) == 1.0);  // inside the second ball
    CHECK(at(0.0, 1.5) == 0.0);
    CHECK(at(-1.5, 0.0) == 0.0);

    // idempotence
    for (long i = 0; i < g.point_count(); ++i) {
        CHECK(chi[i] * chi[i] == chi[i]);
    }
}

TEST_CASE("domain must respect the truncation margin") {
    const GridSpec g = build_grid(1, 2.0, 11); // h = 0.4, margin 1.6
    DomainSpec domain;
    domain.primitives.push_back(BallShape{{0.0, 0.0}, 0.7});
    CHECK_THROWS_AS(domain.validate(g), std::invalid_argument);
}

TEST_CASE("ball_indices examples") {
    const GridSpec g = build_grid(1, 2.0, 5); // h = 1, points -2..2
    // radius below h/2 captures only the center point
    CHECK(ball_indices(g, {0.0, 0.0}, 0.4) == std::vector<long>{2});
    // radius 1.5 captures {-1, 0, 1}
    CHECK(ball_indices(g, {0.0, 0.0}, 1.5) == std::vector<long>{1, 2, 3});
    // large radius captures everything
    CHECK(static_cast<long>(ball_indices(g, {0.0, 0.0}, 10.0).size()) == g.point_count());
    CHECK_THROWS_AS(ball_indices(g, {0.0, 0.0}, 0.0), std::invalid_argument);
}

TEST_CASE("symmetric specs sample to exactly symmetric fields") {
    const GridSpec g = build_grid(1, 2.5, 88); // even point count as well
    DomainSpec domain;
    domain.primitives.push_back(BallShape{{0.0, 0.0}, 1.0});
    ObstacleSpec obs{1.0, {0.0, 0.0}, 0.5};
    const ScalarField phi = sample_obstacle(obs, domain, g);
    const ScalarField chi = indicator_omega(domain, g);
    const int n = g.points_per_axis;
    for (int i = 0; i < n; ++i) {
        CHECK(phi[i] == phi[n - 1 - i]);
        CHECK(chi[i] == chi[n - 1 - i]);
    }
}

TEST_CASE("obstacle support stays inside the domain on the grid") {
    testutil::Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const GridSpec g = build_grid(1, 3.0, 201);
        DomainSpec domain;
        const double r_dom = rng.uniform(0.5, 1.2);
        domain.primitives.push_back(BallShape{{0.0, 0.0}, r_dom});
        ObstacleSpec obs{rng.uniform(0.5, 2.0), {rng.uniform(-0.2, 0.2), 0.0},
                         rng.uniform(0.1, 0.3)};
        if (std::abs(obs.center[0]) + obs.radius > r_dom) continue;
        const ScalarField phi = sample_obstacle(obs, domain, g);
        const ScalarField chi = indicator_omega(domain, g);
        for (long i = 0; i < g.point_count(); ++i) {
            if (phi[i] > 0.0) CHECK(chi[i] == 1.0);
        }
    }
}

TEST_CASE("complement measure counts cells outside the domain") {
    const GridSpec g = build_grid(1, 2.0, 401);
    DomainSpec domain;
    domain.primitives.push_back(BallShape{{0.0, 0.0}, 1.0});
    const ScalarField chi = indicator_omega(domain, g);
    const double measure = complement_measure(chi);
    CHECK(measure == doctest::Approx(2.0).epsilon(0.02));
}
