#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "qnav/policy.hpp"

namespace qnav::adv {

struct AttackConfig {
    double epsilon = 0.05;   // max-norm budget in normalized sensor units
    int steps = 1;           // sign-gradient iterations; 1 is the single-step attack
    double step_size = 0.05; // per-iteration magnitude
    std::array<bool, kModalityCount> target_modalities = {true, true, true, true, true};
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct PerturbedFrames {
    std::vector<SensorFrame> frames;
    double delta_norm = 0.0;  // max-norm of the applied perturbation
};

// Scalar loss over a set of frames, typically the policy surrogate evaluated
// through the full encode/circuit/readout pipeline.
using LossFn = std::function<double(const std::vector<SensorFrame>&)>;

// Negative log-probability of the given action under the policy, optionally
// weighted. The workhorse loss for input-space attacks.
LossFn nll_of_action(const rl::Policy& policy, env::Action action, double weight = 1.0);

// Per-component loss gradient by central finite differences (h = 1e-4),
// one-sided at the [0, 1] boundary so probes stay in the valid sensor space.
// Output shapes mirror the input frames.
std::vector<std::vector<double>> input_gradient(const std::vector<SensorFrame>& frames,
                                                const LossFn& loss);

// Iterated sign-gradient ascent on the loss, projected onto the epsilon
// max-norm ball around the clean input and clamped to [0, 1]. Only the
// configured target modalities move.
PerturbedFrames pgd_perturb(const std::vector<SensorFrame>& frames, const AttackConfig& config,
                            const LossFn& loss);

// Convenience overload attacking the policy's own clean decision: the loss is
// the negative log-probability of the greedy action on the unperturbed input.
PerturbedFrames pgd_perturb(const rl::Policy& policy, const std::vector<SensorFrame>& frames,
                            const AttackConfig& config);

enum class StructuredAttackKind { GpsJam, LidarSpoof, CameraPatch };
const char* structured_attack_name(StructuredAttackKind kind);
StructuredAttackKind structured_attack_from_name(const std::string& name);

// Number of rays replaced by LidarSpoof and the short range they report.
constexpr int kLidarSpoofRayCount = 3;
constexpr double kLidarSpoofFloor = 0.125;

// Named sensor-specific attacks. magnitude in [0, 1] scales each attack from
// identity to full strength; only the attack's own modality is touched.
PerturbedFrames structured_attack(const std::vector<SensorFrame>& frames,
                                  StructuredAttackKind kind, double magnitude,
                                  std::uint64_t seed = 0);

struct LossReport {
    double clean_loss = 0.0;
    double adv_loss = 0.0;
    double lambda = 0.0;
    double total = 0.0;  // always clean_loss + lambda * adv_loss
};

struct RobustStepResult {
    rl::Policy policy;
    LossReport report;
};

// One robust ascent step: the clean policy gradient plus lambda times the
// gradient on adversarially perturbed replays of the same trajectory states.
// With lambda 0 this is exactly reinforce_update.
RobustStepResult robust_training_step(const rl::Policy& policy,
                                      const std::vector<rl::Trajectory>& batch, double lambda,
                                      const AttackConfig& attack, const rl::TrainConfig& train);

}  // namespace qnav::adv
