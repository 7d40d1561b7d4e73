#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "qnav/checkpoint.hpp"
#include "qnav/config.hpp"
#include "run_support.hpp"

namespace {

using qnav::cfg::ConfigError;
using qnav::cfg::ExperimentConfig;

struct Options {
    std::string config_path;
    std::string checkpoint_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::vector<std::string> attack_kinds;
};

ExperimentConfig effective_config(const Options& opts) {
    ExperimentConfig config;
    if (!opts.config_path.empty()) {
        config = qnav::cfg::load_config_file(opts.config_path);
    } else {
        config.validate();
    }
    if (opts.seed_given) {
        config.rng_seed = opts.seed;
        config.train.rng_seed = opts.seed;
        config.attack.rng_seed = opts.seed;
    }
    if (!opts.out_dir.empty()) config.output_dir = opts.out_dir;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qnav: quantum-fused navigation experiments over a secured sensor bus"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opts;
    app.add_option("--config", opts.config_path, "JSON experiment config (defaults when omitted)");
    app.add_option("--seed", opts.seed, "overrides the config's rng_seed")
        ->each([&opts](const std::string&) { opts.seed_given = true; });
    app.add_option("--out", opts.out_dir, "overrides the config's output directory");

    CLI::App* train = app.add_subcommand("train", "policy-gradient training run");
    CLI::App* eval = app.add_subcommand("eval", "greedy evaluation of a checkpoint");
    CLI::App* attack = app.add_subcommand("attack", "attack sweep against a checkpoint");
    CLI::App* bus_demo = app.add_subcommand("bus-demo", "two-process secured sensor stream");
    CLI::App* bench = app.add_subcommand("bench", "per-stage latency of a secured decision tick");

    eval->add_option("--checkpoint", opts.checkpoint_path, "trained parameters")->required();
    attack->add_option("--checkpoint", opts.checkpoint_path, "trained parameters")->required();
    attack->add_option("--kind", opts.attack_kinds,
                       "attack subset: pgd, gps-jam, lidar-spoof, camera-patch");
    bench->add_option("--checkpoint", opts.checkpoint_path,
                      "trained parameters (seeded init when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // 2 for every usage error; 0 for --help
    }

    try {
        const ExperimentConfig config = effective_config(opts);
        if (train->parsed()) return qnav::cli::cmd_train(config);
        if (eval->parsed()) return qnav::cli::cmd_eval(config, opts.checkpoint_path);
        if (attack->parsed()) {
            return qnav::cli::cmd_attack(config, opts.checkpoint_path, opts.attack_kinds);
        }
        if (bus_demo->parsed()) return qnav::cli::cmd_bus_demo(config);
        if (bench->parsed()) return qnav::cli::cmd_bench(config, opts.checkpoint_path);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "qnav: " << e.what() << '\n';
        return 2;
    } catch (const qnav::ckpt::CheckpointError& e) {
        std::cerr << "qnav: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "qnav: error: " << e.what() << '\n';
        return 1;
    }
}
