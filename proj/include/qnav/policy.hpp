#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qnav/environment.hpp"
#include "qnav/fusion.hpp"

namespace qnav::rl {

constexpr int kMaxEpisodeSteps = 200;

// Variational navigation policy. Sensor frames are amplitude encoded, run
// through the layered circuit, and the first action_count Z expectations
// become softmax logits scaled by the temperature.
struct Policy {
    CircuitParams circuit;
    AttentionWeights attention;
    double softmax_temperature = 2.0;
    int action_count = env::kActionCount;

    void validate() const;
};

struct TrajectoryStep {
    std::vector<SensorFrame> frames;  // observation the decision was made on
    env::Action action = env::Action::KeepLane;
    double log_prob = 0.0;
    double reward = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;
    std::vector<double> returns;  // discounted reward-to-go per step
    double discount = 1.0;

    double total_reward() const;
};

// Fills trajectory.returns with G_t = sum_{k>=t} discount^(k-t) r_k.
void compute_returns(Trajectory& trajectory, double discount);

enum class Baseline { None, MeanReturn };

struct TrainConfig {
    double learning_rate = 0.05;
    int episodes_per_update = 16;
    Baseline baseline = Baseline::MeanReturn;
    double discount = 0.99;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct NonFiniteGradient : std::runtime_error {
    explicit NonFiniteGradient(const std::string& what) : std::runtime_error(what) {}
};

// softmax(temperature * z), numerically stable, strictly positive.
std::vector<double> softmax_scores(const std::vector<double>& z, double temperature,
                                   int action_count);

// Full pipeline readout: encode, run the circuit, measure Z on every qubit.
std::vector<double> policy_readout(const Policy& policy, const std::vector<SensorFrame>& frames);

// Probability vector over the discrete actions; sums to 1.
std::vector<double> action_distribution(const Policy& policy,
                                        const std::vector<SensorFrame>& frames);

// d z_qubit / d theta for every circuit angle, row-major depth x num_qubits.
// Exact for RY generators: [z(theta + pi/2) - z(theta - pi/2)] / 2.
std::vector<double> parameter_shift_gradient(const Policy& policy,
                                             const std::vector<SensorFrame>& frames, int qubit);

enum class RolloutMode { Sample, Greedy };

// Rolls one episode in a fresh environment. Sample mode draws actions from
// the policy with an RNG stream derived from env_seed; Greedy takes the
// argmax. Stops when the episode ends or after kMaxEpisodeSteps.
Trajectory run_episode(const Policy& policy, const env::EnvConfig& env_config,
                       std::uint64_t env_seed, RolloutMode mode, double discount);

struct UpdateResult {
    Policy policy;
    double policy_loss = 0.0;  // negated surrogate, lower is better
};

// One REINFORCE ascent step on theta and (when trainable) the attention
// weights. Throws NonFiniteGradient and leaves the input policy untouched if
// any gradient entry is NaN or infinite.
UpdateResult reinforce_update(const Policy& policy, const std::vector<Trajectory>& batch,
                              const TrainConfig& config);

// Internal surrogate machinery shared with the adversarial trainer.
namespace detail {

struct WeightedStep {
    const std::vector<SensorFrame>* frames = nullptr;
    env::Action action = env::Action::KeepLane;
    double advantage = 0.0;
};

struct SurrogateGradient {
    std::vector<double> d_theta;                                // depth x num_qubits
    std::array<std::vector<double>, kModalityCount> d_alpha;    // per-modality
    double surrogate = 0.0;  // (1/batch) sum advantage * log pi(action|frames)

    bool finite() const;
};

// Gradient of the surrogate over the given steps, scaled by inv_batch.
// Theta gradients use the parameter-shift rule; attention gradients use
// central finite differences with step kAlphaFdStep.
SurrogateGradient surrogate_gradient(const Policy& policy, const std::vector<WeightedStep>& steps,
                                     double inv_batch, bool want_alpha);

constexpr double kAlphaFdStep = 1e-5;

void apply_ascent(Policy& policy, const SurrogateGradient& grad, double learning_rate);

double mean_return_baseline(const std::vector<Trajectory>& batch);

std::vector<WeightedStep> weighted_steps(const std::vector<Trajectory>& batch, double baseline);

}  // namespace detail

}  // namespace qnav::rl
