#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "kdvduo/experiments.hpp"

namespace {

int dispatch(const std::string& subcommand, const std::string& config_path,
             const std::string& out_dir, bool have_seed, std::uint64_t seed,
             const std::string& axis, const std::vector<double>& values) {
    using namespace kdvduo;
    ExperimentConfig config =
        config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (subcommand != "sweep") config.experiment = experiment_from_name(subcommand);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (have_seed) config.seed = seed;

    const RunOutcome outcome =
        (subcommand == "sweep") ? sweep(config, axis, values) : run(config);
    for (const auto& [k, v] : outcome.metrics) std::cout << k << " = " << v << "\n";
    return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kdvduo: boundary control toolkit for a coupled two-KdV system"};
    app.require_subcommand(1);

    std::string config_path, out_dir, axis = "L";
    std::uint64_t seed = 0;
    bool have_seed = false;
    std::vector<double> values;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--out", out_dir, "output directory (overrides config)");
        cmd->add_option("--seed", seed, "seed for randomized inputs (overrides config)")
            ->each([&](const std::string&) { have_seed = true; });
    };

    for (const char* name : {"simulate", "adjoint", "atlas", "witness", "margin", "control",
                             "nlcontrol", "verify"}) {
        add_common(app.add_subcommand(name));
    }
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run one experiment over an axis");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--axis", axis, "sweep axis: L, T or amplitude");
    sweep_cmd->add_option("--values", values, "axis values (sorted, positive)")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        return dispatch(sub, config_path, out_dir, have_seed, seed, axis, values);
    } catch (const kdvduo::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const kdvduo::InvalidParams& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 1;
    } catch (const kdvduo::NoConvergence& e) {
        std::cerr << "no convergence: " << e.what() << "\n";
        return 2;
    } catch (const kdvduo::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
