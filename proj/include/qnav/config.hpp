#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnav/adversarial.hpp"
#include "qnav/environment.hpp"
#include "qnav/policy.hpp"

namespace qnav::cfg {

// Raised for every malformed or inconsistent configuration; the message names
// the offending JSON field path.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error("config: " + what) {}
};

// Everything one experiment run needs, in one JSON document. Every field has
// a desk-scale default, so "{}" is a valid config.
struct ExperimentConfig {
    // environment
    env::EnvConfig environment;

    // fusion
    int num_qubits = 5;
    int depth = 3;
    std::array<int, kModalityCount> modality_dims = env::kSensorDims;
    double softmax_temperature = 2.0;
    bool attention_trainable = true;

    // navq
    rl::TrainConfig train;
    int updates = 25;  // training updates per run

    // adversarial
    adv::AttackConfig attack;
    double lambda = 0.0;
    std::vector<double> eval_epsilons = {0.0, 0.025, 0.05, 0.1};
    int eval_episodes = 100;

    // securebus
    std::uint8_t suite_id = 1;
    std::string registry_path;
    bool per_frame_signature = false;

    // global
    std::uint64_t rng_seed = 0;
    std::string output_dir = "out";

    // Enforces per-module invariants plus the cross-field rules: the modality
    // dims must fit 2^Q amplitudes, every action needs a readout qubit, and
    // the dims must match what the environment emits.
    void validate() const;
};

ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// The effective config (defaults filled in) as sorted-key JSON; equal configs
// produce equal text, so its hash identifies the run.
std::string config_to_json(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

}  // namespace qnav::cfg
