// Command-line front end: one subcommand per task.
#include "dispersal/config.hpp"
#include "dispersal/errors.hpp"
#include "dispersal/run.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace dispersal;

int main(int argc, char** argv) {
    CLI::App app{"Dispersal-switching reaction-diffusion laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string threshold_name;

    struct Cmd {
        const char* name;
        const char* help;
        TaskKind kind;
    };
    const Cmd cmds[] = {
        {"eigen", "principal eigenvalue of the linearisation at zero", TaskKind::eigen},
        {"steady", "integrate to a steady state", TaskKind::steady},
        {"simulate", "integrate and record the trajectory", TaskKind::simulate},
        {"threshold", "locate a threshold parameter", TaskKind::threshold},
        {"sweep", "three-component outcomes over a parameter sweep", TaskKind::sweep},
        {"verify", "run the verification battery", TaskKind::verify},
    };
    std::vector<std::pair<CLI::App*, TaskKind>> subs;
    for (const Cmd& c : cmds) {
        CLI::App* s = app.add_subcommand(c.name, c.help);
        auto* opt = s->add_option("--config", config_path, "scenario JSON file");
        if (c.kind != TaskKind::verify) {
            opt->required();
        }
        s->add_option("--out", out_dir, "output directory (overrides the config)");
        s->add_option("--seed", seed, "seed for random initial data (overrides the config)");
        if (c.kind == TaskKind::threshold) {
            s->add_option("--name", threshold_name,
                          "mu_star, mu_zero, d_c, d_0, beta_c or alpha_c (overrides the config)");
        }
        subs.emplace_back(s, c.kind);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    TaskKind kind = TaskKind::verify;
    for (const auto& [s, k] : subs) {
        if (s->parsed()) {
            kind = k;
        }
    }

    ScenarioConfig cfg;
    try {
        cfg = config_path.empty() ? default_verify_config() : load_config(config_path);
        cfg.task.kind = kind;
        if (!out_dir.empty()) {
            cfg.output = out_dir;
        }
        if (seed) {
            cfg.seed = *seed;
        }
        if (!threshold_name.empty()) {
            cfg.task.threshold = threshold_from_string(threshold_name);
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }

    const RunArtifacts art = run_scenario(cfg);
    for (const auto& p : art.csv) {
        std::cout << "wrote " << p.string() << "\n";
    }
    for (const auto& p : art.svg) {
        std::cout << "wrote " << p.string() << "\n";
    }
    std::cout << "report " << art.report.string() << "\n";
    if (art.exit_status != exit_ok) {
        std::cerr << "error: " << art.message << "\n";
    }
    return art.exit_status;
}
