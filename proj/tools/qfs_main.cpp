// Command-line front end for the feature-selection pipeline. Each subcommand
// runs one stage against a JSON run configuration; artifacts land in the
// configured output directory so stages can be re-run independently.

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "qfs/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitMissingArtifact = 3;
constexpr int kExitValidation = 4;
constexpr int kExitNumerical = 5;

struct Invocation {
    std::string config_path;
    std::optional<std::string> output_dir;
    std::optional<long long> seed;
    std::string stage;
    bool plots = false;
};

int dispatch(const Invocation& inv) {
    qfs::RunConfig config = qfs::load_config(inv.config_path);
    if (inv.output_dir) config.output_dir = *inv.output_dir;
    if (inv.seed) config.base_seed = static_cast<std::uint64_t>(*inv.seed);
    if (inv.plots) {
        qfs::emit_plots(config, std::cerr);
    } else {
        qfs::run_stage(qfs::stage_from_string(inv.stage), config, std::cerr);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum-annealing-inspired feature selection pipeline"};
    app.require_subcommand(1);

    Invocation inv;
    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", inv.config_path, "Path to the JSON run configuration")
            ->required();
        cmd->add_option("--output-dir", inv.output_dir,
                        "Override the configured artifact directory");
        cmd->add_option("--seed", inv.seed, "Override the configured base seed");
    };

    for (const std::string stage :
         {"ingest", "info", "embed", "program", "simulate", "select", "evaluate", "all"}) {
        CLI::App* cmd = app.add_subcommand(stage, "Run the '" + stage + "' stage");
        add_common(cmd);
        cmd->callback([&inv, stage] { inv.stage = stage; });
    }
    CLI::App* plots = app.add_subcommand(
        "emit-plots", "Write figure CSVs from the artifacts of a completed run");
    add_common(plots);
    plots->callback([&inv] { inv.plots = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        app.exit(e);
        return kExitConfig;
    }

    try {
        return dispatch(inv);
    } catch (const qfs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const qfs::MissingArtifactError& e) {
        std::cerr << "missing artifact: " << e.what() << '\n';
        return kExitMissingArtifact;
    } catch (const qfs::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const qfs::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}
