#include "fracfb/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "fracfb/report.hpp"

namespace fracfb {

namespace {

struct RawEntry {
    std::string value;
    int line = 0;
    mutable bool used = false;
};

struct RawConfig {
    std::map<std::string, RawEntry> entries;
    std::vector<ConfigError>* errors = nullptr;

    const RawEntry* find(const std::string& key) const {
        auto it = entries.find(key);
        if (it == entries.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    void error(const std::string& field, const std::string& message, int line = 0) const {
        errors->push_back(ConfigError{line, field, message});
    }

    bool parse_double(const std::string& key, double& out, bool required) const {
        const RawEntry* e = find(key);
        if (e == nullptr) {
            if (required) error(key, "missing required key");
            return false;
        }
        char* end = nullptr;
        const double v = std::strtod(e->value.c_str(), &end);
        if (end == e->value.c_str() || *end != '\0') {
            error(key, "not a number: '" + e->value + "'", e->line);
            return false;
        }
        out = v;
        return true;
    }

    bool parse_long(const std::string& key, long& out, bool required) const {
        const RawEntry* e = find(key);
        if (e == nullptr) {
            if (required) error(key, "missing required key");
            return false;
        }
        char* end = nullptr;
        const long v = std::strtol(e->value.c_str(), &end, 10);
        if (end == e->value.c_str() || *end != '\0') {
            error(key, "not an integer: '" + e->value + "'", e->line);
            return false;
        }
        out = v;
        return true;
    }

    bool parse_bool(const std::string& key, bool& out) const {
        const RawEntry* e = find(key);
        if (e == nullptr) return false;
        if (e->value == "true") {
            out = true;
        } else if (e->value == "false") {
            out = false;
        } else {
            error(key, "expected true/false, got '" + e->value + "'", e->line);
            return false;
        }
        return true;
    }

    bool parse_word(const std::string& key, std::string& out, bool required) const {
        const RawEntry* e = find(key);
        if (e == nullptr) {
            if (required) error(key, "missing required key");
            return false;
        }
        out = e->value;
        return true;
    }

    bool parse_vector(const std::string& key, std::vector<double>& out, bool required) const {
        const RawEntry* e = find(key);
        if (e == nullptr) {
            if (required) error(key, "missing required key");
            return false;
        }
        out.clear();
        std::istringstream iss(e->value);
        std::string tok;
        while (iss >> tok) {
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0') {
                error(key, "not a number list: '" + e->value + "'", e->line);
                return false;
            }
            out.push_back(v);
        }
        if (out.empty()) {
            error(key, "empty number list", e->line);
            return false;
        }
        return true;
    }

    bool parse_point(const std::string& key, int dimension, Point& out, bool required) const {
        std::vector<double> v;
        if (!parse_vector(key, v, required)) return false;
        const RawEntry* e = find(key);
        if (static_cast<int>(v.size()) != dimension) {
            error(key, "expected " + std::to_string(dimension) + " coordinate(s)",
                  e != nullptr ? e->line : 0);
            return false;
        }
        out = {v[0], dimension == 2 ? v[1] : 0.0};
        return true;
    }
};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

void check_open_unit(RawConfig& raw, const std::string& field, double v) {
    if (!(v > 0.0 && v < 1.0)) {
        raw.error(field, "value " + format_double(v) + " outside the open interval (0,1)");
    }
}

bool parse_primitive(RawConfig& raw, const std::string& prefix, int dimension,
                     DomainPrimitive& out) {
    std::string shape;
    if (!raw.parse_word(prefix + "shape", shape, true)) return false;
    if (shape == "ball") {
        BallShape ball;
        bool ok = raw.parse_point(prefix + "center", dimension, ball.center, true);
        ok = raw.parse_double(prefix + "radius", ball.radius, true) && ok;
        if (ok && !(ball.radius > 0.0)) {
            raw.error(prefix + "radius", "radius must be positive");
            ok = false;
        }
        out = ball;
        return ok;
    }
    if (shape == "box") {
        BoxShape box;
        bool ok = raw.parse_point(prefix + "lo", dimension, box.lo, true);
        ok = raw.parse_point(prefix + "hi", dimension, box.hi, true) && ok;
        out = box;
        return ok;
    }
    raw.error(prefix + "shape", "unknown shape '" + shape + "' (expected ball or box)");
    return false;
}

} // namespace

std::string ParseResult::describe() const {
    std::ostringstream oss;
    for (const auto& e : errors) {
        oss << "config error";
        if (e.line > 0) oss << " [line " << e.line << "]";
        if (!e.field.empty()) oss << " " << e.field;
        oss << ": " << e.message << "\n";
    }
    return oss.str();
}

ParseResult parse_config(const std::string& text) {
    ParseResult result;
    RawConfig raw;
    raw.errors = &result.errors;

    // tokenize
    std::istringstream iss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(iss, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            result.errors.push_back(ConfigError{line_no, "", "expected 'key = value'"});
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            result.errors.push_back(ConfigError{line_no, key, "empty key or value"});
            continue;
        }
        if (raw.entries.count(key) != 0) {
            result.errors.push_back(ConfigError{line_no, key, "duplicate key"});
            continue;
        }
        raw.entries[key] = RawEntry{value, line_no, false};
    }

    ScenarioConfig& c = result.config;

    long dim = 1;
    if (raw.parse_long("grid.dimension", dim, true)) {
        if (dim != 1 && dim != 2) {
            raw.error("grid.dimension", "must be 1 or 2");
        } else {
            c.dimension = static_cast<int>(dim);
        }
    }
    raw.parse_double("grid.half_width", c.half_width, true);
    if (!(c.half_width > 0.0)) raw.error("grid.half_width", "must be positive");
    long pts = c.points;
    if (raw.parse_long("grid.points", pts, true)) {
        if (pts < 3) {
            raw.error("grid.points", "must be >= 3");
        } else {
            c.points = static_cast<int>(pts);
        }
    }

    // domain: either flat keys or indexed primitives
    c.domain.primitives.clear();
    long prim_count = 1;
    raw.parse_long("domain.count", prim_count, false);
    if (prim_count < 1 || prim_count > 4) {
        raw.error("domain.count", "must be between 1 and 4");
        prim_count = std::min(std::max(prim_count, 1L), 4L);
    }
    if (raw.entries.count("domain.shape") != 0) {
        DomainPrimitive prim;
        if (parse_primitive(raw, "domain.", c.dimension, prim)) {
            c.domain.primitives.push_back(prim);
        }
    } else {
        for (long k = 1; k <= prim_count; ++k) {
            DomainPrimitive prim;
            if (parse_primitive(raw, "domain." + std::to_string(k) + ".", c.dimension, prim)) {
                c.domain.primitives.push_back(prim);
            }
        }
    }

    raw.parse_double("obstacle.amplitude", c.obstacle.amplitude, true);
    if (!(c.obstacle.amplitude > 0.0)) raw.error("obstacle.amplitude", "must be positive");
    raw.parse_point("obstacle.center", c.dimension, c.obstacle.center, true);
    raw.parse_double("obstacle.radius", c.obstacle.radius, true);
    if (!(c.obstacle.radius > 0.0)) raw.error("obstacle.radius", "must be positive");

    if (raw.parse_double("frac.alpha", c.alpha, true)) {
        if (!(c.alpha > 0.0 && c.alpha < 1.0)) {
            raw.error("frac.alpha", "alpha must be inside the open interval (0,1)");
        }
    }
    raw.parse_double("frac.c_norm_scale", c.c_norm_scale, false);

    raw.parse_double("volume.gamma", c.gamma, true);
    if (c.gamma < 0.0) raw.error("volume.gamma", "must be non-negative");
    raw.parse_double("volume.tau_pos", c.tau_pos, false);
    raw.parse_bool("volume.allow_zero_gamma", c.allow_zero_gamma);
    if (c.gamma == 0.0 && !c.allow_zero_gamma) {
        raw.error("volume.gamma",
                  "gamma = 0 is degenerate; set volume.allow_zero_gamma = true to accept");
    }

    if (raw.parse_double("schedule.sigma0", c.schedule.sigma0, false)) {
        check_open_unit(raw, "schedule.sigma0", c.schedule.sigma0);
    }
    if (raw.parse_double("schedule.delta0", c.schedule.delta0, false)) {
        check_open_unit(raw, "schedule.delta0", c.schedule.delta0);
    }
    if (raw.parse_double("schedule.rho", c.schedule.rho, false)) {
        check_open_unit(raw, "schedule.rho", c.schedule.rho);
    }
    raw.parse_double("schedule.sigma_min", c.schedule.sigma_min, false);
    raw.parse_double("schedule.delta_min", c.schedule.delta_min, false);
    std::vector<double> eps;
    if (raw.parse_vector("schedule.epsilon_grid", eps, false)) {
        for (std::size_t k = 0; k < eps.size(); ++k) {
            if (!(eps[k] > 0.0 && eps[k] < 1.0)) {
                raw.error("schedule.epsilon_grid", "entries must be in (0,1)");
                break;
            }
            if (k > 0 && !(eps[k] < eps[k - 1])) {
                raw.error("schedule.epsilon_grid", "entries must be strictly decreasing");
                break;
            }
        }
        c.schedule.epsilon_grid = eps;
    }

    raw.parse_double("solver.grad_tol", c.grad_tol, false);
    if (!(c.grad_tol > 0.0)) raw.error("solver.grad_tol", "must be positive");
    raw.parse_long("solver.max_iters", c.max_iters, false);
    if (c.max_iters < 1) raw.error("solver.max_iters", "must be >= 1");
    raw.parse_bool("solver.clamp_safeguard", c.clamp_safeguard);
    raw.parse_double("solver.vol_tol", c.vol_tol, false);
    if (!(c.vol_tol > 0.0)) raw.error("solver.vol_tol", "must be positive");

    raw.parse_bool("diagnostics.enabled", c.diagnostics_enabled);
    long stride = c.holder_stride;
    if (raw.parse_long("diagnostics.stride", stride, false)) {
        if (stride < 1) {
            raw.error("diagnostics.stride", "must be >= 1");
        } else {
            c.holder_stride = static_cast<int>(stride);
        }
    }
    raw.parse_double("diagnostics.shrink", c.harnack_shrink, false);
    if (!(c.harnack_shrink > 0.0 && c.harnack_shrink < 1.0)) {
        raw.error("diagnostics.shrink", "must be in (0,1)");
    }

    raw.parse_word("output.dir", c.output_dir, false);
    raw.parse_long("seed", c.seed, false);

    for (const auto& kv : raw.entries) {
        if (!kv.second.used) {
            result.errors.push_back(
                ConfigError{kv.second.line, kv.first, "unknown key"});
        }
    }

    // Cross-field checks that need assembled geometry.
    if (result.errors.empty()) {
        try {
            const GridSpec grid = build_grid(c.dimension, c.half_width, c.points);
            c.domain.validate(grid);
            c.obstacle.validate(c.domain, grid);
            const ScalarField chi = indicator_omega(c.domain, grid);
            const double reachable = complement_measure(chi);
            if (c.gamma >= reachable) {
                raw.error("volume.gamma",
                          "unreachable volume: gamma = " + format_double(c.gamma) +
                              " but the box minus the domain measures " +
                              format_double(reachable));
            }
        } catch (const std::exception& ex) {
            result.errors.push_back(ConfigError{0, "geometry", ex.what()});
        }
    }
    return result;
}

std::string serialize_config(const ScenarioConfig& c) {
    std::ostringstream oss;
    const int dim = c.dimension;
    const auto put = [&](const std::string& key, const std::string& v) {
        oss << key << " = " << v << "\n";
    };
    const auto put_d = [&](const std::string& key, double v) { put(key, format_double(v)); };
    const auto put_p = [&](const std::string& key, const Point& p) {
        std::string v = format_double(p[0]);
        if (dim == 2) v += " " + format_double(p[1]);
        put(key, v);
    };

    put("grid.dimension", std::to_string(c.dimension));
    put_d("grid.half_width", c.half_width);
    put("grid.points", std::to_string(c.points));

    put("domain.count", std::to_string(c.domain.primitives.size()));
    for (std::size_t k = 0; k < c.domain.primitives.size(); ++k) {
        const std::string pre = "domain." + std::to_string(k + 1) + ".";
        if (const auto* ball = std::get_if<BallShape>(&c.domain.primitives[k])) {
            put(pre + "shape", "ball");
            put_p(pre + "center", ball->center);
            put_d(pre + "radius", ball->radius);
        } else {
            const auto& box = std::get<BoxShape>(c.domain.primitives[k]);
            put(pre + "shape", "box");
            put_p(pre + "lo", box.lo);
            put_p(pre + "hi", box.hi);
        }
    }

    put_d("obstacle.amplitude", c.obstacle.amplitude);
    put_p("obstacle.center", c.obstacle.center);
    put_d("obstacle.radius", c.obstacle.radius);

    put_d("frac.alpha", c.alpha);
    put_d("frac.c_norm_scale", c.c_norm_scale);

    put_d("volume.gamma", c.gamma);
    put_d("volume.tau_pos", c.tau_pos);
    put("volume.allow_zero_gamma", c.allow_zero_gamma ? "true" : "false");

    put_d("schedule.sigma0", c.schedule.sigma0);
    put_d("schedule.delta0", c.schedule.delta0);
    put_d("schedule.rho", c.schedule.rho);
    put_d("schedule.sigma_min", c.schedule.sigma_min);
    put_d("schedule.delta_min", c.schedule.delta_min);
    {
        std::string v;
        for (std::size_t k = 0; k < c.schedule.epsilon_grid.size(); ++k) {
            if (k > 0) v += " ";
            v += format_double(c.schedule.epsilon_grid[k]);
        }
        put("schedule.epsilon_grid", v);
    }

    put_d("solver.grad_tol", c.grad_tol);
    put("solver.max_iters", std::to_string(c.max_iters));
    put("solver.clamp_safeguard", c.clamp_safeguard ? "true" : "false");
    put_d("solver.vol_tol", c.vol_tol);

    put("diagnostics.enabled", c.diagnostics_enabled ? "true" : "false");
    put("diagnostics.stride", std::to_string(c.holder_stride));
    put_d("diagnostics.shrink", c.harnack_shrink);

    put("output.dir", c.output_dir);
    put("seed", std::to_string(c.seed));
    return oss.str();
}

bool config_equal(const ScenarioConfig& a, const ScenarioConfig& b) {
    return serialize_config(a) == serialize_config(b);
}

Scenario make_scenario(const ScenarioConfig& config) {
    const GridSpec grid = build_grid(config.dimension, config.half_width, config.points);
    return Scenario::build(grid, config.domain, config.obstacle, config.alpha, config.gamma,
                           config.tau_pos, config.allow_zero_gamma, config.c_norm_scale);
}

ContinuationSchedule effective_schedule(const ScenarioConfig& config) {
    ContinuationSchedule s = config.schedule;
    const GridSpec grid = build_grid(config.dimension, config.half_width, config.points);
    const double floor = 0.1 * std::pow(grid.spacing(), config.alpha);
    s.delta_min = std::max(s.delta_min, floor);
    if (s.delta0 < s.delta_min) s.delta0 = std::min(0.99, 2.0 * s.delta_min);
    return s;
}

} // namespace fracfb
