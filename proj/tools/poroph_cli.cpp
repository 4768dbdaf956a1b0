// Command-line front end. Links only the C interface.
//
// Exit codes: 0 pass, 1 numerical or structural failure, 2 configuration error.

#include "poroph/poroph.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kConfig = 2;

int exit_code_for(pph_status s) {
    switch (s) {
    case PPH_OK: return kPass;
    case PPH_ERR_CONFIG:
    case PPH_ERR_INVALID_ARGUMENT: return kConfig;
    default: return kFail;
    }
}

int report_error(pph_status s) {
    std::cerr << "poroph: " << pph_status_name(s) << ": " << pph_last_error() << '\n';
    return exit_code_for(s);
}

struct Options {
    std::string config;
    std::string out;
    std::optional<double> tol;
    std::optional<std::int64_t> seed;
};

int run(const std::string& verb, const Options& opt) {
    pph_scenario* sc = nullptr;
    pph_status s = pph_scenario_load(opt.config.c_str(), &sc);
    if (s != PPH_OK) return report_error(s);
    if (opt.seed) {
        if (*opt.seed < 0) {
            pph_scenario_free(sc);
            std::cerr << "poroph: --seed must be >= 0\n";
            return kConfig;
        }
        pph_scenario_set_seed(sc, static_cast<std::uint64_t>(*opt.seed));
    }
    if (opt.tol && (s = pph_scenario_set_tol(sc, *opt.tol)) != PPH_OK) {
        pph_scenario_free(sc);
        return report_error(s);
    }

    char* report = nullptr;
    int passed = 0;
    if (verb == "check") {
        s = pph_cmd_check(sc, &report, &passed);
    } else if (verb == "simulate") {
        s = pph_cmd_simulate(sc, opt.out.c_str(), &report, &passed);
    } else if (verb == "compare") {
        s = pph_cmd_compare(sc, &report, &passed);
    } else {
        s = pph_cmd_export(sc, opt.out.c_str(), &report, &passed);
    }
    pph_scenario_free(sc);
    if (s != PPH_OK) return report_error(s);
    std::cout << report << '\n';
    pph_string_free(report);
    return passed ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Port-Hamiltonian poroelasticity toolkit"};
    app.require_subcommand(1);

    Options opt;
    const auto add_common = [&](CLI::App* sub, bool needs_out) {
        sub->add_option("--config", opt.config, "scenario JSON file")->required();
        auto* out = sub->add_option("--out", opt.out, needs_out ? "output path" : "unused by this verb");
        if (needs_out) out->required();
        sub->add_option("--tol", opt.tol, "tolerance override");
        sub->add_option("--seed", opt.seed, "seed override");
    };
    add_common(app.add_subcommand("check", "structure and index report"), false);
    add_common(app.add_subcommand("simulate", "run the scenario and write a CSV trajectory"), true);
    add_common(app.add_subcommand("compare", "compare two formulations"), false);
    add_common(app.add_subcommand("export", "write matrices and a manifest"), true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }
    if (opt.tol && !(*opt.tol > 0.0)) {
        std::cerr << "poroph: --tol must be > 0\n";
        return kConfig;
    }
    return run(app.get_subcommands().front()->get_name(), opt);
}
