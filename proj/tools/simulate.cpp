// SPDX-License-Identifier: Apache-2.0
//
// simulate: Monte-Carlo experiments for equilibrium power allocation in CDMA
// ------------------------------------------------------------------------

#include "cdmagame/config.hpp"
#include "cdmagame/errors.hpp"
#include "cdmagame/experiments.hpp"
#include "cdmagame/records.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <map>
#include <string>
#include <vector>

int main(int argc, char **argv) {
    using namespace cdmagame;

    CLI::App app{"Monte-Carlo experiments for equilibrium power allocation in uplink CDMA"};
    app.get_formatter()->column_width(34);

    // Options are collected as text and applied through the same parser as
    // config files, so both routes accept identical syntax.
    const std::vector<std::pair<std::string, std::string>> options = {
        {"experiment", "theory-vs-sim | utility-vs-L | inverse-power-vs-alpha | ordering-gain-vs-L | property-suite"},
        {"K", "number of users (default 32, 128 for ordering-gain-vs-L)"},
        {"N", "spreading length (default 256)"},
        {"L", "path count or comma-separated list"},
        {"sigma2", "noise variance (default 1e-10)"},
        {"M", "bits per packet (default 100)"},
        {"trials", "Monte-Carlo trials (default 1000)"},
        {"seed", "64-bit seed (default 1)"},
        {"filter", "mf | mmse | opt | mf-sic | mmse-sic | all, comma-separated"},
        {"ordering", "random | decreasing | increasing"},
        {"alpha-sweep", "comma-separated loads for inverse-power-vs-alpha"},
        {"output", "output path, - for stdout"},
        {"format", "csv | json"},
        {"workers", "worker threads (default: hardware threads)"},
    };
    std::map<std::string, std::string> given;
    for (const auto &[name, help] : options)
        app.add_option("--" + name, given[name], help);
    std::string configPath;
    app.add_option("--config", configPath, "key=value file; command-line flags take precedence");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        ExperimentConfig cfg;
        if (!configPath.empty())
            for (const auto &[key, value] : read_config_file(configPath))
                if (app.count("--" + key) == 0)
                    apply_option(cfg, key, value);
        for (const auto &[name, help] : options)
            if (app.count("--" + name) > 0)
                apply_option(cfg, name, given[name]);
        cfg.validate();

        const auto records = run_experiment(cfg);
        emit_records(records, cfg.format, cfg.output);
    } catch (const UsageError &e) {
        std::cerr << "simulate: " << e.what() << "\n" << "Run with --help for more information.\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "simulate: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
