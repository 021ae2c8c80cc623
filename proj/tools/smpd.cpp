// Command-line front end: runs characterization scenarios against a device
// configuration and validates configuration files.
//
//   smpd run <scenario> [--config file] [--seed n] [--out dir] [--set k=v]
//   smpd list-scenarios
//   smpd validate --config <file>
//
// Exit codes: 0 all checks passed, 1 at least one check failed, 2 execution
// error (bad configuration, unknown scenario, I/O failure).

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "smpd/smpd.hpp"

namespace {

smpd::ParameterFile load_parameter_file(const std::string& path) {
    smpd::ParameterFile file;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw smpd::ConfigError("cannot open configuration file: " + path);
        file = smpd::parse_parameter_text(in);
    }
    smpd::apply_environment_overrides(file);
    return file;
}

void print_report(const smpd::ScenarioReport& report) {
    std::printf("scenario: %s  (seed %llu)\n", report.scenario.c_str(),
                static_cast<unsigned long long>(report.seed));
    for (const smpd::Check& c : report.checks) {
        std::printf("  %s  %-32s computed %.6g  target %.6g  (%s tol %.4g)  [%s]\n",
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.computed, c.target,
                    smpd::to_string(c.kind), c.tolerance, c.label.c_str());
    }
    std::size_t passed = 0;
    for (const smpd::Check& c : report.checks) passed += c.pass ? 1 : 0;
    std::printf("result: %zu/%zu checks passed\n", passed, report.checks.size());
    for (const std::string& f : report.files) std::printf("  wrote %s\n", f.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Digital twin of a cyclically operated single microwave photon detector"};
    app.require_subcommand(1);

    std::string scenario_name, config_path, out_dir = "out";
    std::uint64_t seed = 20260810;
    std::vector<std::string> set_overrides;

    CLI::App* run = app.add_subcommand("run", "Run a characterization scenario");
    run->add_option("scenario", scenario_name, "Scenario name (see list-scenarios)")->required();
    run->add_option("--config", config_path, "Configuration file (defaults if omitted)");
    run->add_option("--seed", seed, "Random seed for the scenario");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--set", set_overrides, "Override a configuration key, key=value");

    CLI::App* list = app.add_subcommand("list-scenarios", "List available scenarios");

    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate", "Validate a configuration file");
    validate->add_option("--config", validate_path, "Configuration file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const std::string& name : smpd::list_scenarios()) std::printf("%s\n", name.c_str());
            return 0;
        }
        if (validate->parsed()) {
            const smpd::SimulationConfig cfg = smpd::load_config(validate_path);
            std::printf("configuration ok: kappa_d/2pi = %.1f kHz, eta(resonance) = %.3f\n",
                        smpd::to_khz(cfg.kappa_d()), cfg.eta_resonance());
            return 0;
        }

        const auto kind = smpd::parse_scenario_kind(scenario_name);
        if (!kind) {
            std::fprintf(stderr, "error: unknown scenario '%s' (try list-scenarios)\n",
                         scenario_name.c_str());
            return 2;
        }
        smpd::Scenario scenario;
        scenario.kind = *kind;
        scenario.seed = seed;
        scenario.output_dir = out_dir;
        for (const std::string& kv : set_overrides) {
            const std::size_t eq = kv.find('=');
            if (eq == std::string::npos)
                throw smpd::ConfigError("--set expects key=value, got: " + kv);
            scenario.overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
        }

        const smpd::ScenarioReport report =
            smpd::run_scenario(scenario, load_parameter_file(config_path));
        print_report(report);
        return report.all_pass() ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
