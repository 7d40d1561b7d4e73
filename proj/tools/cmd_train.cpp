#include <chrono>
#include <filesystem>
#include <numeric>
#include <sstream>

#include "commands.hpp"
#include "qnav/adversarial.hpp"
#include "qnav/checkpoint.hpp"
#include "qnav/rng.hpp"
#include "run_support.hpp"

namespace qnav::cli {

namespace {

double batch_mean_return(const std::vector<rl::Trajectory>& batch) {
    double sum = 0.0;
    for (const rl::Trajectory& t : batch) sum += t.total_reward();
    return sum / static_cast<double>(batch.size());
}

}  // namespace

int cmd_train(const cfg::ExperimentConfig& config) {
    namespace fs = std::filesystem;
    const fs::path out_dir = config.output_dir;
    fs::create_directories(out_dir);

    rl::Policy policy = initial_policy(config);
    // One seed stream hands out the per-episode environment seeds for the
    // whole run, so the rollout schedule is a pure function of the run seed.
    rng::Engine episode_seeder = rng::make_engine(config.rng_seed, 30);

    // Measured wall-clock goes to a separate file so metrics.csv stays
    // byte-identical across reruns of the same (config, seed).
    std::ostringstream metrics;
    metrics << "update,mean_return,policy_loss,adv_loss\n";
    std::ostringstream timings;
    timings << "update,wall_ms\n";

    log_info("train: " + std::to_string(config.updates) + " updates x " +
             std::to_string(config.train.episodes_per_update) + " episodes, lambda " +
             fmt17(config.lambda));

    for (int update = 0; update < config.updates; ++update) {
        const auto t0 = std::chrono::steady_clock::now();

        std::vector<rl::Trajectory> batch;
        batch.reserve(static_cast<std::size_t>(config.train.episodes_per_update));
        for (int e = 0; e < config.train.episodes_per_update; ++e) {
            batch.push_back(run_episode(policy, config.environment, episode_seeder(),
                                        rl::RolloutMode::Sample, config.train.discount));
        }

        double policy_loss = 0.0;
        double adv_loss = 0.0;
        if (config.lambda > 0.0) {
            adv::RobustStepResult result = adv::robust_training_step(
                policy, batch, config.lambda, config.attack, config.train);
            policy = std::move(result.policy);
            policy_loss = result.report.clean_loss;
            adv_loss = result.report.adv_loss;
        } else {
            rl::UpdateResult result = rl::reinforce_update(policy, batch, config.train);
            policy = std::move(result.policy);
            policy_loss = result.policy_loss;
        }

        const double mean_return = batch_mean_return(batch);
        metrics << update << ',' << fmt17(mean_return) << ',' << fmt17(policy_loss) << ','
                << fmt17(adv_loss) << '\n';

        const auto t1 = std::chrono::steady_clock::now();
        const double wall_ms =
            std::chrono::duration<double, std::milli>(t1 - t0).count();
        timings << update << ',' << fmt17(wall_ms) << '\n';
        log_debug("update " + std::to_string(update) + ": mean return " + fmt17(mean_return) +
                  ", loss " + fmt17(policy_loss));
    }

    write_text_file(out_dir / "metrics.csv", metrics.str());
    write_text_file(out_dir / "timings.csv", timings.str());
    ckpt::save_file((out_dir / "checkpoint.txt").string(), policy.circuit, policy.attention);
    write_run_manifest(config, "train", out_dir);

    log_info("train: wrote " + (out_dir / "metrics.csv").string() + " and " +
             (out_dir / "checkpoint.txt").string());
    return 0;
}

}  // namespace qnav::cli
