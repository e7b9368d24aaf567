#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qmod/runners.hpp"

namespace qmod::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariantFailure = 1;
inline constexpr int kExitConfigError = 2;

struct Options {
    std::string subcommand;
    std::string config_path;
    std::optional<std::string> out;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
};

inline void emit(const table::ResultTable& t, const Options& opt) {
    const std::string payload = t.serialize(opt.format);
    if (opt.out) {
        std::ofstream f(*opt.out, std::ios::binary);
        if (!f)
            throw ConfigError("cannot open output file: " + *opt.out);
        f << payload;
    } else {
        std::cout << payload;
    }
}

/// Dispatch one fully parsed invocation. Throws qmod errors on bad input;
/// returns the process exit code otherwise.
inline int dispatch(const Options& opt) {
    runners::json cfg = runners::load_config(opt.config_path);
    if (opt.seed)
        cfg["seed"] = *opt.seed;

    if (opt.subcommand == "modular") {
        emit(runners::run_modular(cfg), opt);
        return kExitOk;
    }
    if (opt.subcommand == "susy") {
        emit(runners::run_susy(cfg), opt);
        return kExitOk;
    }
    if (opt.subcommand == "udw") {
        emit(runners::run_udw(cfg), opt);
        return kExitOk;
    }
    if (opt.subcommand == "sweep") {
        emit(runners::run_sweep(cfg), opt);
        return kExitOk;
    }
    if (opt.subcommand == "verify") {
        verify::SuiteConfig sc = runners::parse_verify_config(cfg, opt.seed);
        std::vector<verify::CheckResult> results = verify::run_suite(sc);
        emit(runners::verify_table(results), opt);
        int failed = 0;
        for (const auto& r : results)
            if (!r.pass) {
                ++failed;
                std::cerr << "FAIL: " << r.module << " / " << r.name
                          << " residual " << table::format_double(r.residual) << " > tolerance "
                          << table::format_double(r.tolerance) << "\n";
            }
        std::cerr << "verify: " << (results.size() - failed) << "/" << results.size()
                  << " checks passed\n";
        return failed == 0 ? kExitOk : kExitInvariantFailure;
    }
    throw ConfigError("unknown subcommand: " + opt.subcommand);
}

inline int run(int argc, char** argv) {
    CLI::App app{"modular-operator entanglement toolkit"};
    app.require_subcommand(1);

    Options opt;
    for (const char* name : {"modular", "susy", "udw", "sweep", "verify"}) {
        CLI::App* sub = app.add_subcommand(
            name, std::string("run the ") + name + " scenario table");
        sub->add_option("--config", opt.config_path, "path to the JSON run configuration")
            ->required();
        sub->add_option("--out", [&opt](const std::vector<std::string>& v) {
            opt.out = v.back();
            return true;
        }, "write the table here instead of stdout");
        sub->add_option("--format", opt.format, "csv | json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", [&opt](const std::vector<std::string>& v) {
            opt.seed = std::stoull(v.back());
            return true;
        }, "override the config seed");
        sub->callback([&opt, name] { opt.subcommand = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfigError;
    }

    try {
        return dispatch(opt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

} // namespace qmod::cli
