// fracfb command-line front end.
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fracfb/commands.hpp"
#include "fracfb/config.hpp"
#include "fracfb/runtime.hpp"

namespace {

int load_config(const std::string& path, fracfb::ScenarioConfig& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "fracfb: cannot open config '" << path << "'\n";
        return 1;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    const fracfb::ParseResult parsed = fracfb::parse_config(buf.str());
    if (!parsed.ok()) {
        std::cerr << parsed.describe();
        return 1;
    }
    out = parsed.config;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracfb: fractional free-boundary energy minimizer"};
    app.require_subcommand(1);
    app.fallthrough(); // accept global flags after the subcommand as well

    int threads = 1;
    app.add_option("--threads", threads, "cap on internal parallelism")->capture_default_str();

    std::string config_path;
    std::string field_path;

    CLI::App* solve = app.add_subcommand("solve", "run the continuation solve");
    solve->add_option("config", config_path, "scenario configuration file")->required();

    CLI::App* validate = app.add_subcommand("validate-kernel", "run kernel accuracy checks");
    validate->add_option("config", config_path, "scenario configuration file")->required();

    CLI::App* diagnose = app.add_subcommand("diagnose", "diagnostics on a saved field");
    diagnose->add_option("config", config_path, "scenario configuration file")->required();
    diagnose->add_option("field", field_path, "field CSV produced by solve")->required();

    CLI::App* sweep = app.add_subcommand("sweep-epsilon", "volume tuning sweep");
    sweep->add_option("config", config_path, "scenario configuration file")->required();

    CLI11_PARSE(app, argc, argv);
    fracfb::set_thread_cap(threads);

    fracfb::ScenarioConfig config;
    const int rc = load_config(config_path, config);
    if (rc != 0) return rc;

    if (solve->parsed()) return fracfb::cmd_solve(config);
    if (validate->parsed()) return fracfb::cmd_validate_kernel(config);
    if (diagnose->parsed()) return fracfb::cmd_diagnose(config, field_path);
    if (sweep->parsed()) return fracfb::cmd_sweep_epsilon(config);
    return 1;
}
