#include "qnav/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qnav::rl {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

std::vector<double> readout_from_fused(const FusedState& fused, const CircuitParams& circuit) {
    return extract_features(apply_ansatz(fused, circuit));
}

double log_sum_exp(const std::vector<double>& logits) {
    const double m = *std::max_element(logits.begin(), logits.end());
    double s = 0.0;
    for (double x : logits) s += std::exp(x - m);
    return m + std::log(s);
}

// log pi(action) for readouts z under the policy head.
double log_prob_from_z(const std::vector<double>& z, double temperature, int action_count,
                       int action) {
    std::vector<double> logits(static_cast<std::size_t>(action_count));
    for (int a = 0; a < action_count; ++a) logits[a] = temperature * z[a];
    return logits[action] - log_sum_exp(logits);
}

}  // namespace

void Policy::validate() const {
    circuit.validate();
    if (action_count < 1 || action_count > circuit.num_qubits) {
        throw std::invalid_argument("action_count must be in [1, num_qubits]");
    }
    if (!(softmax_temperature > 0.0) || !std::isfinite(softmax_temperature)) {
        throw std::invalid_argument("softmax_temperature must be positive and finite");
    }
    for (int m = 0; m < kModalityCount; ++m) {
        for (double w : attention.weights[m]) {
            if (!std::isfinite(w)) throw std::invalid_argument("non-finite attention weight");
        }
    }
}

double Trajectory::total_reward() const {
    double total = 0.0;
    for (const TrajectoryStep& s : steps) total += s.reward;
    return total;
}

void compute_returns(Trajectory& trajectory, double discount) {
    if (!(discount > 0.0 && discount <= 1.0)) {
        throw std::invalid_argument("discount must be in (0, 1]");
    }
    trajectory.discount = discount;
    trajectory.returns.assign(trajectory.steps.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = trajectory.steps.size(); i-- > 0;) {
        acc = trajectory.steps[i].reward + discount * acc;
        trajectory.returns[i] = acc;
    }
}

void TrainConfig::validate() const {
    // Zero is allowed so an update can be evaluated without moving parameters.
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw std::invalid_argument("train.learning_rate must be non-negative");
    }
    if (episodes_per_update < 1) {
        throw std::invalid_argument("train.episodes_per_update must be positive");
    }
    if (!(discount > 0.0 && discount <= 1.0)) {
        throw std::invalid_argument("train.discount must be in (0, 1]");
    }
}

std::vector<double> softmax_scores(const std::vector<double>& z, double temperature,
                                   int action_count) {
    if (static_cast<int>(z.size()) < action_count) {
        throw std::invalid_argument("readout vector shorter than action count");
    }
    std::vector<double> logits(static_cast<std::size_t>(action_count));
    for (int a = 0; a < action_count; ++a) logits[a] = temperature * z[a];
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    std::vector<double> probs(logits.size());
    for (std::size_t a = 0; a < logits.size(); ++a) {
        probs[a] = std::exp(logits[a] - m);
        sum += probs[a];
    }
    for (double& p : probs) p /= sum;
    return probs;
}

std::vector<double> policy_readout(const Policy& policy, const std::vector<SensorFrame>& frames) {
    const FusedState fused = encode_frames(frames, policy.attention, policy.circuit.num_qubits);
    return readout_from_fused(fused, policy.circuit);
}

std::vector<double> action_distribution(const Policy& policy,
                                        const std::vector<SensorFrame>& frames) {
    return softmax_scores(policy_readout(policy, frames), policy.softmax_temperature,
                          policy.action_count);
}

std::vector<double> parameter_shift_gradient(const Policy& policy,
                                             const std::vector<SensorFrame>& frames, int qubit) {
    const CircuitParams& circuit = policy.circuit;
    if (qubit < 0 || qubit >= circuit.num_qubits) {
        throw std::out_of_range("readout qubit out of range");
    }
    const FusedState fused = encode_frames(frames, policy.attention, circuit.num_qubits);
    std::vector<double> grad(circuit.thetas.size(), 0.0);
    CircuitParams shifted = circuit;
    for (std::size_t i = 0; i < circuit.thetas.size(); ++i) {
        shifted.thetas[i] = circuit.thetas[i] + kHalfPi;
        const double plus = expectation_z(apply_ansatz(fused, shifted), qubit);
        shifted.thetas[i] = circuit.thetas[i] - kHalfPi;
        const double minus = expectation_z(apply_ansatz(fused, shifted), qubit);
        shifted.thetas[i] = circuit.thetas[i];
        grad[i] = (plus - minus) / 2.0;
    }
    return grad;
}

Trajectory run_episode(const Policy& policy, const env::EnvConfig& env_config,
                       std::uint64_t env_seed, RolloutMode mode, double discount) {
    policy.validate();
    env::Environment environment(env_config, env_seed);
    rng::Engine action_rng = rng::make_engine(env_seed, 2);

    Trajectory trajectory;
    env::StepResult current = environment.reset(env_seed);
    while (!current.done && static_cast<int>(trajectory.steps.size()) < kMaxEpisodeSteps) {
        const std::vector<double> probs = action_distribution(policy, current.frames);
        int action = 0;
        if (mode == RolloutMode::Greedy) {
            action = static_cast<int>(std::max_element(probs.begin(), probs.end()) -
                                      probs.begin());
        } else {
            const double u = rng::uniform01(action_rng);
            double cumulative = 0.0;
            action = static_cast<int>(probs.size()) - 1;
            for (std::size_t a = 0; a < probs.size(); ++a) {
                cumulative += probs[a];
                if (u < cumulative) {
                    action = static_cast<int>(a);
                    break;
                }
            }
        }
        TrajectoryStep step;
        step.frames = std::move(current.frames);
        step.action = static_cast<env::Action>(action);
        step.log_prob = std::log(probs[action]);
        env::StepResult next = environment.step(step.action);
        step.reward = next.reward;
        trajectory.steps.push_back(std::move(step));
        current = std::move(next);
    }
    compute_returns(trajectory, discount);
    return trajectory;
}

namespace detail {

bool SurrogateGradient::finite() const {
    for (double g : d_theta) {
        if (!std::isfinite(g)) return false;
    }
    for (const auto& per_modality : d_alpha) {
        for (double g : per_modality) {
            if (!std::isfinite(g)) return false;
        }
    }
    return std::isfinite(surrogate);
}

SurrogateGradient surrogate_gradient(const Policy& policy, const std::vector<WeightedStep>& steps,
                                     double inv_batch, bool want_alpha) {
    const CircuitParams& circuit = policy.circuit;
    const double beta = policy.softmax_temperature;
    const int actions = policy.action_count;

    SurrogateGradient grad;
    grad.d_theta.assign(circuit.thetas.size(), 0.0);
    for (int m = 0; m < kModalityCount; ++m) {
        grad.d_alpha[m].assign(policy.attention.weights[m].size(), 0.0);
    }

    CircuitParams shifted = circuit;
    AttentionWeights nudged = policy.attention;

    for (const WeightedStep& ws : steps) {
        const int a = static_cast<int>(ws.action);
        const double weight = ws.advantage * inv_batch;

        const FusedState fused = encode_frames(*ws.frames, policy.attention, circuit.num_qubits);
        const std::vector<double> z = readout_from_fused(fused, circuit);
        const std::vector<double> probs = softmax_scores(z, beta, actions);
        grad.surrogate += weight * std::log(probs[a]);

        // d log pi(a) / d theta = beta * sum_k (delta_ak - pi_k) dz_k/d theta,
        // with dz/d theta from the parameter-shift rule. The encoding does not
        // depend on theta, so the fused state is reused across shifts.
        for (std::size_t i = 0; i < circuit.thetas.size(); ++i) {
            shifted.thetas[i] = circuit.thetas[i] + kHalfPi;
            const std::vector<double> z_plus = readout_from_fused(fused, shifted);
            shifted.thetas[i] = circuit.thetas[i] - kHalfPi;
            const std::vector<double> z_minus = readout_from_fused(fused, shifted);
            shifted.thetas[i] = circuit.thetas[i];

            double dlogp = 0.0;
            for (int k = 0; k < actions; ++k) {
                const double dz = (z_plus[k] - z_minus[k]) / 2.0;
                const double indicator = (k == a) ? 1.0 : 0.0;
                dlogp += beta * (indicator - probs[k]) * dz;
            }
            grad.d_theta[i] += weight * dlogp;
        }

        if (!want_alpha) continue;

        // Attention weights enter through the encoding; central differences.
        for (int m = 0; m < kModalityCount; ++m) {
            auto& alpha = nudged.weights[m];
            for (std::size_t j = 0; j < alpha.size(); ++j) {
                const double saved = alpha[j];
                alpha[j] = saved + kAlphaFdStep;
                double logp_plus, logp_minus;
                try {
                    const FusedState f_plus =
                        encode_frames(*ws.frames, nudged, circuit.num_qubits);
                    logp_plus = log_prob_from_z(readout_from_fused(f_plus, circuit), beta,
                                                actions, a);
                    alpha[j] = saved - kAlphaFdStep;
                    const FusedState f_minus =
                        encode_frames(*ws.frames, nudged, circuit.num_qubits);
                    logp_minus = log_prob_from_z(readout_from_fused(f_minus, circuit), beta,
                                                 actions, a);
                } catch (const AllZeroInput&) {
                    // A nudge can only zero the encoding when the clean input
                    // was already degenerate; treat the direction as flat.
                    alpha[j] = saved;
                    continue;
                }
                alpha[j] = saved;
                grad.d_alpha[m][j] +=
                    weight * (logp_plus - logp_minus) / (2.0 * kAlphaFdStep);
            }
        }
    }
    return grad;
}

void apply_ascent(Policy& policy, const SurrogateGradient& grad, double learning_rate) {
    for (std::size_t i = 0; i < policy.circuit.thetas.size(); ++i) {
        policy.circuit.thetas[i] += learning_rate * grad.d_theta[i];
    }
    if (policy.attention.trainable) {
        for (int m = 0; m < kModalityCount; ++m) {
            auto& alpha = policy.attention.weights[m];
            for (std::size_t j = 0; j < alpha.size(); ++j) {
                alpha[j] += learning_rate * grad.d_alpha[m][j];
            }
        }
    }
}

double mean_return_baseline(const std::vector<Trajectory>& batch) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const Trajectory& t : batch) {
        for (double g : t.returns) {
            sum += g;
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

std::vector<WeightedStep> weighted_steps(const std::vector<Trajectory>& batch, double baseline) {
    std::vector<WeightedStep> steps;
    for (const Trajectory& t : batch) {
        if (t.returns.size() != t.steps.size()) {
            throw std::invalid_argument("trajectory returns not computed");
        }
        for (std::size_t i = 0; i < t.steps.size(); ++i) {
            if (!std::isfinite(t.returns[i])) {
                throw std::invalid_argument("non-finite return in batch");
            }
            steps.push_back(WeightedStep{&t.steps[i].frames, t.steps[i].action,
                                         t.returns[i] - baseline});
        }
    }
    return steps;
}

}  // namespace detail

UpdateResult reinforce_update(const Policy& policy, const std::vector<Trajectory>& batch,
                              const TrainConfig& config) {
    policy.validate();
    config.validate();
    if (batch.empty()) throw std::invalid_argument("empty trajectory batch");

    const double baseline =
        config.baseline == Baseline::MeanReturn ? detail::mean_return_baseline(batch) : 0.0;
    const std::vector<detail::WeightedStep> steps = detail::weighted_steps(batch, baseline);
    const double inv_batch = 1.0 / static_cast<double>(batch.size());

    const detail::SurrogateGradient grad =
        detail::surrogate_gradient(policy, steps, inv_batch, policy.attention.trainable);
    if (!grad.finite()) {
        throw NonFiniteGradient("non-finite policy gradient; parameters left untouched");
    }

    UpdateResult result{policy, -grad.surrogate};
    detail::apply_ascent(result.policy, grad, config.learning_rate);
    return result;
}

}  // namespace qnav::rl
