#include "qnav/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qnav/rng.hpp"

namespace qnav::adv {

namespace {

constexpr double kInputFdStep = 1e-4;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Derivative of the loss in one sensor component. Central difference in the
// interior; the probe interval shrinks to one side at the [0,1] boundary so
// every evaluation stays in the valid sensor space.
double component_gradient(std::vector<SensorFrame>& frames, std::size_t frame_index,
                          std::size_t component, const LossFn& loss) {
    double& value = frames[frame_index].values[component];
    const double saved = value;
    const double hi = std::min(saved + kInputFdStep, 1.0);
    const double lo = std::max(saved - kInputFdStep, 0.0);

    value = hi;
    const double loss_hi = loss(frames);
    value = lo;
    const double loss_lo = loss(frames);
    value = saved;
    return (loss_hi - loss_lo) / (hi - lo);
}

int greedy_action(const rl::Policy& policy, const std::vector<SensorFrame>& frames) {
    const std::vector<double> probs = rl::action_distribution(policy, frames);
    return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

const SensorFrame* find_frame(const std::vector<SensorFrame>& frames, Modality m) {
    for (const SensorFrame& f : frames) {
        if (f.modality == m) return &f;
    }
    return nullptr;
}

double max_abs_delta(const std::vector<SensorFrame>& a, const std::vector<SensorFrame>& b) {
    double norm = 0.0;
    for (std::size_t f = 0; f < a.size(); ++f) {
        for (std::size_t c = 0; c < a[f].values.size(); ++c) {
            norm = std::max(norm, std::abs(a[f].values[c] - b[f].values[c]));
        }
    }
    return norm;
}

}  // namespace

void AttackConfig::validate() const {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw std::invalid_argument("attack.epsilon must be non-negative");
    }
    if (steps < 1) throw std::invalid_argument("attack.steps must be at least 1");
    if (!(step_size > 0.0) || !std::isfinite(step_size)) {
        throw std::invalid_argument("attack.step_size must be positive");
    }
}

LossFn nll_of_action(const rl::Policy& policy, env::Action action, double weight) {
    const int a = static_cast<int>(action);
    if (a < 0 || a >= policy.action_count) {
        throw std::out_of_range("action outside the policy's action set");
    }
    return [policy, a, weight](const std::vector<SensorFrame>& frames) {
        const std::vector<double> probs = rl::action_distribution(policy, frames);
        return -weight * std::log(probs[a]);
    };
}

std::vector<std::vector<double>> input_gradient(const std::vector<SensorFrame>& frames,
                                                const LossFn& loss) {
    std::vector<SensorFrame> probe = frames;
    std::vector<std::vector<double>> grad(frames.size());
    bool finite = true;
    for (std::size_t f = 0; f < frames.size(); ++f) {
        grad[f].resize(frames[f].values.size());
        for (std::size_t c = 0; c < frames[f].values.size(); ++c) {
            grad[f][c] = component_gradient(probe, f, c, loss);
            finite = finite && std::isfinite(grad[f][c]);
        }
    }
    if (!finite) throw rl::NonFiniteGradient("non-finite input gradient");
    return grad;
}

PerturbedFrames pgd_perturb(const std::vector<SensorFrame>& frames, const AttackConfig& config,
                            const LossFn& loss) {
    config.validate();
    for (const SensorFrame& f : frames) validate_frame(f);

    PerturbedFrames result{frames, 0.0};
    if (config.epsilon == 0.0) return result;

    std::vector<SensorFrame>& cur = result.frames;
    for (int iter = 0; iter < config.steps; ++iter) {
        const std::vector<std::vector<double>> grad = input_gradient(cur, loss);
        for (std::size_t f = 0; f < cur.size(); ++f) {
            if (!config.target_modalities[static_cast<int>(cur[f].modality)]) continue;
            for (std::size_t c = 0; c < cur[f].values.size(); ++c) {
                const double g = grad[f][c];
                const double sg = (g > 0.0) ? 1.0 : (g < 0.0) ? -1.0 : 0.0;
                const double clean = frames[f].values[c];
                double v = cur[f].values[c] + config.step_size * sg;
                v = std::clamp(v, clean - config.epsilon, clean + config.epsilon);
                cur[f].values[c] = clamp01(v);
            }
        }
    }
    result.delta_norm = max_abs_delta(cur, frames);
    return result;
}

PerturbedFrames pgd_perturb(const rl::Policy& policy, const std::vector<SensorFrame>& frames,
                            const AttackConfig& config) {
    policy.validate();
    const env::Action clean_choice = static_cast<env::Action>(greedy_action(policy, frames));
    return pgd_perturb(frames, config, nll_of_action(policy, clean_choice));
}

const char* structured_attack_name(StructuredAttackKind kind) {
    switch (kind) {
        case StructuredAttackKind::GpsJam: return "gps-jam";
        case StructuredAttackKind::LidarSpoof: return "lidar-spoof";
        case StructuredAttackKind::CameraPatch: return "camera-patch";
    }
    throw std::invalid_argument("unknown structured attack kind");
}

StructuredAttackKind structured_attack_from_name(const std::string& name) {
    if (name == "gps-jam") return StructuredAttackKind::GpsJam;
    if (name == "lidar-spoof") return StructuredAttackKind::LidarSpoof;
    if (name == "camera-patch") return StructuredAttackKind::CameraPatch;
    throw std::invalid_argument("unknown attack name: " + name);
}

PerturbedFrames structured_attack(const std::vector<SensorFrame>& frames,
                                  StructuredAttackKind kind, double magnitude,
                                  std::uint64_t seed) {
    if (!(magnitude >= 0.0 && magnitude <= 1.0)) {
        throw std::invalid_argument("attack magnitude must be in [0, 1]");
    }
    for (const SensorFrame& f : frames) validate_frame(f);

    const Modality target = kind == StructuredAttackKind::GpsJam      ? Modality::Gps
                            : kind == StructuredAttackKind::LidarSpoof ? Modality::Lidar
                                                                       : Modality::Camera;
    if (find_frame(frames, target) == nullptr) {
        throw std::invalid_argument(std::string("input has no ") +
                                    modality_name(target) + " frame to attack");
    }

    PerturbedFrames result{frames, 0.0};
    SensorFrame* frame = nullptr;
    for (SensorFrame& f : result.frames) {
        if (f.modality == target) frame = &f;
    }
    rng::Engine rng = rng::make_engine(seed, static_cast<std::uint64_t>(kind));

    switch (kind) {
        case StructuredAttackKind::GpsJam: {
            // Constant bias per component, up to +/- magnitude.
            for (double& v : frame->values) {
                const double offset = magnitude * (2.0 * rng::uniform01(rng) - 1.0);
                v = clamp01(v + offset);
            }
            break;
        }
        case StructuredAttackKind::LidarSpoof: {
            // Pull the k nearest returns toward a fake short range.
            std::vector<std::size_t> order(frame->values.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return frame->values[a] < frame->values[b];
            });
            const std::size_t k =
                std::min<std::size_t>(kLidarSpoofRayCount, order.size());
            for (std::size_t i = 0; i < k; ++i) {
                double& v = frame->values[order[i]];
                // Affine blend: magnitude 1 lands exactly on the floor.
                v = clamp01((1.0 - magnitude) * v + magnitude * kLidarSpoofFloor);
            }
            break;
        }
        case StructuredAttackKind::CameraPatch: {
            // Invert a contiguous occupancy block covering a magnitude
            // fraction of the frame, at a seeded position.
            const std::size_t dim = frame->values.size();
            const std::size_t len = static_cast<std::size_t>(
                std::llround(magnitude * static_cast<double>(dim)));
            if (len > 0) {
                const std::size_t start =
                    rng::uniform_below(rng, static_cast<std::uint64_t>(dim - len + 1));
                for (std::size_t i = start; i < start + len; ++i) {
                    frame->values[i] = 1.0 - frame->values[i];
                }
            }
            break;
        }
    }
    result.delta_norm = max_abs_delta(result.frames, frames);
    return result;
}

RobustStepResult robust_training_step(const rl::Policy& policy,
                                      const std::vector<rl::Trajectory>& batch, double lambda,
                                      const AttackConfig& attack, const rl::TrainConfig& train) {
    policy.validate();
    attack.validate();
    train.validate();
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("lambda must be non-negative");
    }
    if (batch.empty()) throw std::invalid_argument("empty trajectory batch");

    using rl::detail::SurrogateGradient;
    using rl::detail::WeightedStep;

    const double baseline = train.baseline == rl::Baseline::MeanReturn
                                ? rl::detail::mean_return_baseline(batch)
                                : 0.0;
    const std::vector<WeightedStep> clean_steps = rl::detail::weighted_steps(batch, baseline);
    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    const bool want_alpha = policy.attention.trainable;

    const SurrogateGradient g_clean =
        rl::detail::surrogate_gradient(policy, clean_steps, inv_batch, want_alpha);
    if (!g_clean.finite()) {
        throw rl::NonFiniteGradient("non-finite clean gradient; parameters left untouched");
    }

    RobustStepResult result;
    result.report.lambda = lambda;
    result.report.clean_loss = -g_clean.surrogate;

    if (lambda == 0.0) {
        // Pure clean update; no attacks generated, adversarial loss reads 0.
        result.report.adv_loss = 0.0;
        result.report.total = result.report.clean_loss + lambda * result.report.adv_loss;
        result.policy = policy;
        rl::detail::apply_ascent(result.policy, g_clean, train.learning_rate);
        return result;
    }

    // Replay the stored decision states under attack: perturb each observation
    // against its own advantage-weighted surrogate term, then re-derive the
    // gradient on the perturbed copies.
    std::vector<std::vector<SensorFrame>> perturbed;
    perturbed.reserve(clean_steps.size());
    for (const WeightedStep& ws : clean_steps) {
        PerturbedFrames p =
            pgd_perturb(*ws.frames, attack, nll_of_action(policy, ws.action, ws.advantage));
        perturbed.push_back(std::move(p.frames));
    }
    std::vector<WeightedStep> adv_steps = clean_steps;
    for (std::size_t i = 0; i < adv_steps.size(); ++i) adv_steps[i].frames = &perturbed[i];

    const SurrogateGradient g_adv =
        rl::detail::surrogate_gradient(policy, adv_steps, inv_batch, want_alpha);
    if (!g_adv.finite()) {
        throw rl::NonFiniteGradient("non-finite adversarial gradient; parameters left untouched");
    }

    result.report.adv_loss = -g_adv.surrogate;
    result.report.total = result.report.clean_loss + lambda * result.report.adv_loss;

    SurrogateGradient combined = g_clean;
    for (std::size_t i = 0; i < combined.d_theta.size(); ++i) {
        combined.d_theta[i] += lambda * g_adv.d_theta[i];
    }
    for (int m = 0; m < kModalityCount; ++m) {
        for (std::size_t j = 0; j < combined.d_alpha[m].size(); ++j) {
            combined.d_alpha[m][j] += lambda * g_adv.d_alpha[m][j];
        }
    }

    result.policy = policy;
    rl::detail::apply_ascent(result.policy, combined, train.learning_rate);
    return result;
}

}  // namespace qnav::adv
