// Command-line driver for the estimator experiments.
//
//   rsmhp run <config> [--seed U64] [--out DIR] [--workers N]
//   rsmhp validate <config>
//   rsmhp list-experiments
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rsmhp/config.hpp"
#include "rsmhp/errors.hpp"
#include "rsmhp/experiments.hpp"
#include "rsmhp/version.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeFailure = 1;
constexpr int kConfigError = 2;

int report_config_error(const rsmhp::ConfigError& e)
{
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Monte-Carlo cost estimators for receding-horizon planning"};
    app.set_version_flag("--version", std::string(rsmhp::kVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<unsigned> workers;

    CLI::App* run = app.add_subcommand("run", "Run an experiment and write CSV and JSON results");
    run->add_option("config", config_path, "Experiment config file")->required();
    run->add_option("--seed", seed, "Override the master seed");
    run->add_option("--out", out_dir, "Override the output directory");
    run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    CLI::App* validate = app.add_subcommand("validate", "Check a config file without running it");
    validate->add_option("config", config_path, "Experiment config file")->required();

    app.add_subcommand("list-experiments", "List the available experiment kinds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (app.got_subcommand("list-experiments")) {
            for (auto kind : rsmhp::all_experiment_kinds())
                std::cout << rsmhp::to_string(kind) << '\n';
            return kOk;
        }

        rsmhp::ExperimentSpec spec = rsmhp::load_spec(config_path);
        if (seed)
            spec.master_seed = *seed;
        if (out_dir)
            spec.output_dir = *out_dir;
        if (workers)
            spec.workers = *workers;

        if (validate->parsed()) {
            rsmhp::validate_spec(spec);
            std::cout << "ok: " << rsmhp::to_string(spec.kind) << '\n';
            return kOk;
        }

        const rsmhp::ExperimentOutcome outcome = rsmhp::run_experiment(spec);
        for (const auto& file : outcome.files)
            std::cout << file.string() << '\n';
        return kOk;
    } catch (const rsmhp::ConfigError& e) {
        return report_config_error(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
}
