#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nemlat/errors.hpp"
#include "nemlat/experiments.hpp"

using namespace nemlat;

namespace {

ExperimentConfig load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config " + path);
    Json doc;
    try {
        doc = Json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

void print_checks(const RunReport& r) {
    for (const auto& c : r.checks)
        std::cerr << (c.pass ? "pass " : "FAIL ") << c.name << ": " << format_number(c.value) << ' ' << c.relation << ' '
                  << format_number(c.bound) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nemlat: lattice spin system experiments"};
    bool list = false, quiet = false;
    std::string experiment, config, out;
    std::optional<std::uint64_t> seed;
    app.add_flag("--list", list, "print the experiment registry as JSON");
    app.add_option("--experiment,-e", experiment, "experiment name");
    app.add_option("--config,-c", config, "JSON config file");
    app.add_option("--out,-o", out, "output directory for tables and summary.json");
    app.add_option("--seed", seed, "seed, overrides the config file");
    app.add_flag("--quiet,-q", quiet, "do not echo the summary");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (list) {
        std::cout << list_json().dump(2) << '\n';
        return 0;
    }
    try {
        ExperimentConfig cfg = config.empty() ? ExperimentConfig{} : load(config);
        if (!experiment.empty()) cfg.experiment = experiment;
        if (!out.empty()) cfg.output = out;
        if (seed) cfg.seed = seed;
        if (cfg.experiment.empty()) throw ConfigError("no experiment given; use --experiment or a config file");
        RunReport r = run(cfg);
        if (!quiet) std::cout << r.summary().dump(2) << '\n';
        print_checks(r);
        return r.pass ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
