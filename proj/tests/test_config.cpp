#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "fracfb/config.hpp"

using namespace fracfb;

namespace {

const char* kMinimal1d = R"(
# minimal valid 1D scenario
grid.dimension = 1
grid.half_width = 2.5
grid.points = 101
domain.shape = ball
domain.center = 0
domain.radius = 1
obstacle.amplitude = 1.0
obstacle.center = 0
obstacle.radius = 0.5
frac.alpha = 0.5
volume.gamma = 1.0
)";

} // namespace

TEST_CASE("minimal config parses with documented defaults") {
    const ParseResult r = parse_config(kMinimal1d);
    REQUIRE_MESSAGE(r.ok(), r.describe());
    CHECK(r.config.dimension == 1);
    CHECK(r.config.points == 101);
    CHECK(r.config.alpha == 0.5);
    CHECK(r.config.gamma == 1.0);
    // defaults
    CHECK(r.config.schedule.rho == 0.5);
    CHECK(r.config.grad_tol == 1e-6);
    CHECK(r.config.vol_tol == 0.05);
    CHECK(r.config.output_dir == "out");
    CHECK(r.config.diagnostics_enabled);
}

TEST_CASE("alpha outside (0,1) is reported with the field name and bound") {
    std::string text = kMinimal1d;
    text += "\nfrac.alpha = 1.0\n"; // duplicate too
    const ParseResult r = parse_config(text);
    CHECK_FALSE(r.ok());

    std::string bad = kMinimal1d;
    bad.replace(bad.find("frac.alpha = 0.5"), 16, "frac.alpha = 1.0");
    const ParseResult r2 = parse_config(bad);
    REQUIRE_FALSE(r2.ok());
    bool found = false;
    for (const ConfigError& e : r2.errors) {
        if (e.field == "frac.alpha" && e.message.find("(0,1)") != std::string::npos) {
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("unreachable gamma is a constraint error") {
    std::string bad = kMinimal1d;
    bad.replace(bad.find("volume.gamma = 1.0"), 18, "volume.gamma = 50.0");
    const ParseResult r = parse_config(bad);
    REQUIRE_FALSE(r.ok());
    bool found = false;
    for (const ConfigError& e : r.errors) {
        if (e.message.find("unreachable") != std::string::npos) found = true;
    }
    CHECK(found);
}

TEST_CASE("all violations are reported at once with line numbers") {
    const char* broken = R"(grid.dimension = 3
grid.half_width = -1
grid.points = 2
this line has no equals sign
unknown.key = 42
)";
    const ParseResult r = parse_config(broken);
    CHECK(r.errors.size() >= 5);
    bool has_line_4 = false;
    for (const ConfigError& e : r.errors) {
        if (e.line == 4) has_line_4 = true;
    }
    CHECK(has_line_4);
}

TEST_CASE("config round-trips exactly through serialize and parse") {
    ParseResult base = parse_config(kMinimal1d);
    REQUIRE(base.ok());
    ScenarioConfig c = base.config;
    // perturb with awkward values
    c.half_width = 2.7182818284590451;
    c.alpha = 0.337;
    c.schedule.epsilon_grid = {0.71, 0.333333333333333315, 0.1, 0.025};
    c.gamma = 0.93;
    c.obstacle.amplitude = 1.25;
    c.output_dir = "runs/out_1";
    c.seed = 987654321;

    const std::string text = serialize_config(c);
    const ParseResult round = parse_config(text);
    REQUIRE_MESSAGE(round.ok(), round.describe());
    CHECK(config_equal(c, round.config));
    CHECK(serialize_config(round.config) == text);
}

TEST_CASE("2D config with an indexed union domain") {
    const char* text = R"(
grid.dimension = 2
grid.half_width = 2.0
grid.points = 33
domain.count = 2
domain.1.shape = ball
domain.1.center = -0.5 0
domain.1.radius = 0.6
domain.2.shape = box
domain.2.lo = 0.2 -0.4
domain.2.hi = 1.0 0.4
obstacle.amplitude = 1.0
obstacle.center = -0.5 0
obstacle.radius = 0.3
frac.alpha = 0.4
volume.gamma = 1.0
)";
    const ParseResult r = parse_config(text);
    REQUIRE_MESSAGE(r.ok(), r.describe());
    CHECK(r.config.domain.primitives.size() == 2);
    const Scenario sc = make_scenario(r.config);
    CHECK(sc.grid.dimension == 2);
    // round-trip of the union form
    const ParseResult round = parse_config(serialize_config(r.config));
    REQUIRE(round.ok());
    CHECK(config_equal(r.config, round.config));
}

TEST_CASE("effective schedule floors delta_min by the grid resolution rule") {
    ParseResult r = parse_config(kMinimal1d);
    REQUIRE(r.ok());
    r.config.schedule.delta_min = 1e-3;
    const ContinuationSchedule s = effective_schedule(r.config);
    const double h = build_grid(1, 2.5, 101).spacing();
    CHECK(s.delta_min == doctest::Approx(0.1 * std::pow(h, 0.5)).epsilon(1e-12));
}
