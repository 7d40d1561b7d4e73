#include <filesystem>
#include <iostream>
#include <sstream>

#include "commands.hpp"
#include "qnav/rng.hpp"
#include "run_support.hpp"

namespace qnav::cli {

int cmd_eval(const cfg::ExperimentConfig& config, const std::string& checkpoint_path) {
    namespace fs = std::filesystem;
    const fs::path out_dir = config.output_dir;
    fs::create_directories(out_dir);

    const rl::Policy policy = policy_from_checkpoint(config, checkpoint_path);
    rng::Engine episode_seeder = rng::make_engine(config.rng_seed, 31);

    std::ostringstream rows;
    rows << "episode,env_seed,return,steps,goal,collision\n";
    double sum = 0.0;
    int goals = 0;
    int collisions = 0;
    for (int episode = 0; episode < config.eval_episodes; ++episode) {
        const std::uint64_t env_seed = episode_seeder();
        const EpisodeStats stats = run_greedy_episode(policy, config.environment, env_seed);
        sum += stats.total_reward;
        goals += stats.goal ? 1 : 0;
        collisions += stats.collision ? 1 : 0;
        rows << episode << ',' << env_seed << ',' << fmt17(stats.total_reward) << ','
             << stats.steps << ',' << (stats.goal ? 1 : 0) << ',' << (stats.collision ? 1 : 0)
             << '\n';
    }

    const double mean = sum / static_cast<double>(config.eval_episodes);
    write_text_file(out_dir / "eval.csv", rows.str());
    write_run_manifest(config, "eval", out_dir);

    std::cout << "eval: episodes " << config.eval_episodes << ", mean return " << fmt17(mean)
              << ", goals " << goals << ", collisions " << collisions << '\n';
    return 0;
}

}  // namespace qnav::cli
