#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "commands.hpp"
#include "qnav/adversarial.hpp"
#include "qnav/rng.hpp"
#include "run_support.hpp"

namespace qnav::cli {

namespace {

constexpr const char* kAllAttacks[] = {"pgd", "gps-jam", "lidar-spoof", "camera-patch"};

// Observation rewrite for one (attack, strength) cell. The gradient attack is
// a pure function of the frames; the structured ones draw their noise from a
// per-(episode, step) seed so the whole sweep is reproducible.
FrameFilter make_filter(const std::string& name, double strength,
                        const cfg::ExperimentConfig& config, const rl::Policy& policy,
                        std::uint64_t env_seed) {
    if (strength == 0.0) return {};
    if (name == "pgd") {
        adv::AttackConfig attack = config.attack;
        attack.epsilon = strength;
        if (attack.steps == 1) attack.step_size = strength;
        return [&policy, attack](const std::vector<SensorFrame>& frames, int) {
            return adv::pgd_perturb(policy, frames, attack).frames;
        };
    }
    const adv::StructuredAttackKind kind = adv::structured_attack_from_name(name);
    const std::uint64_t base = rng::splitmix64(env_seed);
    return [kind, strength, base](const std::vector<SensorFrame>& frames, int step) {
        return adv::structured_attack(frames, kind, strength,
                                      base + static_cast<std::uint64_t>(step))
            .frames;
    };
}

}  // namespace

int cmd_attack(const cfg::ExperimentConfig& config, const std::string& checkpoint_path,
               const std::vector<std::string>& attack_names) {
    namespace fs = std::filesystem;

    std::vector<std::string> attacks(attack_names.begin(), attack_names.end());
    if (attacks.empty()) attacks.assign(std::begin(kAllAttacks), std::end(kAllAttacks));
    for (const std::string& name : attacks) {
        if (name == "pgd") continue;
        try {
            adv::structured_attack_from_name(name);
        } catch (const std::exception&) {
            throw cfg::ConfigError("attack '" + name +
                                   "' is unknown; expected pgd, gps-jam, lidar-spoof or "
                                   "camera-patch");
        }
    }

    const fs::path out_dir = config.output_dir;
    fs::create_directories(out_dir);
    const rl::Policy policy = policy_from_checkpoint(config, checkpoint_path);

    // One fixed set of worlds; every cell replays the same episodes so the
    // degradation column compares like with like.
    rng::Engine episode_seeder = rng::make_engine(config.rng_seed, 32);
    std::vector<std::uint64_t> env_seeds(static_cast<std::size_t>(config.eval_episodes));
    for (std::uint64_t& s : env_seeds) s = episode_seeder();

    auto mean_return = [&](const std::string& name, double strength) {
        double sum = 0.0;
        for (const std::uint64_t seed : env_seeds) {
            const FrameFilter filter = make_filter(name, strength, config, policy, seed);
            sum += run_greedy_episode(policy, config.environment, seed, filter).total_reward;
        }
        return sum / static_cast<double>(env_seeds.size());
    };

    const double clean_mean = mean_return("pgd", 0.0);
    log_info("attack: clean mean return " + fmt17(clean_mean) + " over " +
             std::to_string(config.eval_episodes) + " episodes");

    std::ostringstream rows;
    rows << "attack,epsilon,mean_return,degradation_pct\n";
    for (const std::string& name : attacks) {
        for (const double eps : config.eval_epsilons) {
            // Strength zero never touches the frames, so the row restates the
            // clean mean and a degradation of exactly zero.
            const double mean = eps == 0.0 ? clean_mean : mean_return(name, eps);
            const double degradation =
                eps == 0.0 ? 0.0
                           : (clean_mean - mean) /
                                 std::max(std::abs(clean_mean), 1e-12) * 100.0;
            rows << name << ',' << fmt17(eps) << ',' << fmt17(mean) << ','
                 << fmt17(degradation) << '\n';
            std::cout << "attack " << name << " eps " << fmt17(eps) << ": mean return "
                      << fmt17(mean) << ", degradation " << fmt17(degradation) << "%\n";
        }
    }

    write_text_file(out_dir / "attack_report.csv", rows.str());
    write_run_manifest(config, "attack", out_dir);
    return 0;
}

}  // namespace qnav::cli
