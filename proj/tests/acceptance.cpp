// Acceptance gate for the navigation pipeline. Runs ten end-to-end checks,
// prints exactly one PASS/FAIL line per criterion with the measured values
// and pinned tolerances, and exits nonzero if any criterion fails.
//
// Usage: acceptance <path-to-qnav-cli>   (the CLI is exercised by the
// determinism criterion; all other criteria run in-process).

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qnav/adversarial.hpp"
#include "qnav/bus_errors.hpp"
#include "qnav/bus_frame.hpp"
#include "qnav/bus_registry.hpp"
#include "qnav/bus_session.hpp"
#include "qnav/bus_suite.hpp"
#include "qnav/environment.hpp"
#include "qnav/fusion.hpp"
#include "qnav/hashing.hpp"
#include "qnav/policy.hpp"
#include "qnav/rng.hpp"
#include "qnav/statevector.hpp"

using namespace qnav;

namespace {

int g_failures = 0;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double secs() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void report(int index, bool pass, const std::string& detail, double secs) {
    if (!pass) ++g_failures;
    std::printf("%s %2d %s [%.1fs]\n", pass ? "PASS" : "FAIL", index, detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* format, ...) {
    va_list args;
    va_start(args, format);
    char buffer[512];
    std::vsnprintf(buffer, sizeof(buffer), format, args);
    va_end(args);
    return buffer;
}

// Frames for every modality with values in [0, 1); the first lidar component
// is kept away from zero so the encoding never degenerates.
std::vector<SensorFrame> random_frames(rng::Engine& eng) {
    std::vector<SensorFrame> frames;
    for (int m = 0; m < kModalityCount; ++m) {
        SensorFrame f{static_cast<Modality>(m),
                      std::vector<double>(env::kSensorDims[m]), 0};
        for (double& v : f.values) v = rng::uniform01(eng);
        frames.push_back(std::move(f));
    }
    frames[0].values[0] = 0.5 + 0.5 * frames[0].values[0];
    return frames;
}

CircuitParams random_circuit(int depth, int qubits, rng::Engine& eng, double span = M_PI) {
    CircuitParams cp(depth, qubits);
    for (double& th : cp.thetas) th = (rng::uniform01(eng) - 0.5) * 2.0 * span;
    return cp;
}

// Mirrors the CLI trainer's starting point: small angles from a dedicated
// stream, unit attention, softmax temperature from the experiment.
rl::Policy initial_policy(int depth, int qubits, double temperature, std::uint64_t seed) {
    rng::Engine eng = rng::make_engine(seed, 20);
    rl::Policy p{CircuitParams(depth, qubits), AttentionWeights::ones(env::kSensorDims),
                 temperature, env::kActionCount};
    for (double& th : p.circuit.thetas) th = (rng::uniform01(eng) - 0.5) * 0.25 * M_PI;
    p.attention.trainable = false;
    return p;
}

std::vector<std::uint64_t> draw_seeds(rng::Engine& eng, int count) {
    std::vector<std::uint64_t> seeds(count);
    for (auto& s : seeds) s = eng();
    return seeds;
}

double greedy_mean(const rl::Policy& policy, const env::EnvConfig& ec,
                   const std::vector<std::uint64_t>& seeds) {
    double sum = 0.0;
    for (std::uint64_t es : seeds) {
        sum += rl::run_episode(policy, ec, es, rl::RolloutMode::Greedy, 1.0).total_reward();
    }
    return sum / static_cast<double>(seeds.size());
}

// ---------------------------------------------------------------------------
// 1. Quantum-core invariants: norm preservation over 10^4 random gate
//    sequences (drift <= 1e-10), dim == 2^Q for Q in 1..10, CNOT involution
//    bit-exact, RY additivity within 1e-12.
void criterion1() {
    Timer t;
    bool dims_ok = true;
    for (int q = 1; q <= 10; ++q) {
        dims_ok = dims_ok && QuantumState(q).dim() == (std::size_t{1} << q);
    }

    rng::Engine eng = rng::make_engine(11, 0);
    double max_drift = 0.0;
    for (int seq = 0; seq < 10000; ++seq) {
        const int q = 1 + seq % 10;
        QuantumState state(q, oracle::random_state(q, eng));
        for (int g = 0; g < 12; ++g) {
            if (q >= 2 && rng::uniform01(eng) < 0.5) {
                const int control = static_cast<int>(rng::uniform_below(eng, q));
                int target = static_cast<int>(rng::uniform_below(eng, q - 1));
                if (target >= control) ++target;
                state = apply_cnot(state, control, target);
            } else {
                const int wire = static_cast<int>(rng::uniform_below(eng, q));
                state = apply_ry(state, wire, (rng::uniform01(eng) - 0.5) * 4.0 * M_PI);
            }
        }
        max_drift = std::max(max_drift, std::abs(state.norm_squared() - 1.0));
    }

    bool involution_exact = true;
    double max_additivity = 0.0;
    for (int i = 0; i < 200; ++i) {
        const int q = 2 + i % 5;
        const QuantumState state(q, oracle::random_state(q, eng));
        const int control = static_cast<int>(rng::uniform_below(eng, q));
        int target = static_cast<int>(rng::uniform_below(eng, q - 1));
        if (target >= control) ++target;
        const QuantumState twice = apply_cnot(apply_cnot(state, control, target), control, target);
        for (std::size_t k = 0; k < state.dim(); ++k) {
            involution_exact = involution_exact &&
                               twice.amplitude(k).real() == state.amplitude(k).real() &&
                               twice.amplitude(k).imag() == state.amplitude(k).imag();
        }
        const int wire = static_cast<int>(rng::uniform_below(eng, q));
        const double a = (rng::uniform01(eng) - 0.5) * 4.0 * M_PI;
        const double b = (rng::uniform01(eng) - 0.5) * 4.0 * M_PI;
        const QuantumState split = apply_ry(apply_ry(state, wire, a), wire, b);
        const QuantumState joint = apply_ry(state, wire, a + b);
        for (std::size_t k = 0; k < state.dim(); ++k) {
            max_additivity = std::max(max_additivity, std::abs(split.amplitude(k) - joint.amplitude(k)));
        }
    }

    const bool pass = dims_ok && max_drift <= 1e-10 && involution_exact && max_additivity <= 1e-12;
    report(1, pass,
           fmt("quantum-core invariants: norm drift %.2e over 10^4 sequences (tol 1e-10), "
               "dim==2^Q for Q in 1..10 %s, CNOT involution %s, RY additivity %.2e (tol 1e-12)",
               max_drift, dims_ok ? "ok" : "BROKEN",
               involution_exact ? "bit-exact" : "BROKEN", max_additivity),
           t.secs());
}

// ---------------------------------------------------------------------------
// 2. Encoding fidelity: amplitudes equal w*s/sqrt(N) within 1e-12 on 10^3
//    random inputs, power-of-two scale covariance bit-exact, AllZeroInput
//    raised on degenerate input.
void criterion2() {
    Timer t;
    rng::Engine eng = rng::make_engine(22, 0);
    double max_err = 0.0;
    bool tail_zero = true;
    bool scale_exact = true;

    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<SensorFrame> frames = random_frames(eng);
        AttentionWeights weights = AttentionWeights::ones(env::kSensorDims);
        for (auto& w : weights.weights) {
            for (double& x : w) x = 0.25 + 1.75 * rng::uniform01(eng);
        }
        const FusedState fused = encode_frames(frames, weights, 5);

        double norm = 0.0;
        for (int m = 0; m < kModalityCount; ++m) {
            for (int j = 0; j < env::kSensorDims[m]; ++j) {
                const double w = weights.weights[m][j] * frames[m].values[j];
                norm += w * w;
            }
        }
        const double inv_root = 1.0 / std::sqrt(norm);
        for (int m = 0; m < kModalityCount; ++m) {
            for (int j = 0; j < env::kSensorDims[m]; ++j) {
                const double expected = weights.weights[m][j] * frames[m].values[j] * inv_root;
                const double got =
                    fused.state.amplitude(fused.layout.index(static_cast<Modality>(m), j)).real();
                max_err = std::max(max_err, std::abs(got - expected));
            }
        }
        for (std::size_t k = fused.layout.total; k < fused.state.dim(); ++k) {
            tail_zero = tail_zero && fused.state.amplitude(k) == std::complex<double>{0.0, 0.0};
        }

        // Scaling every reading by an exact power of two must cancel exactly.
        std::vector<SensorFrame> scaled = frames;
        for (auto& f : scaled) {
            for (double& v : f.values) v *= 0.25;
        }
        const FusedState fused_scaled = encode_frames(scaled, weights, 5);
        for (std::size_t k = 0; k < fused.state.dim(); ++k) {
            scale_exact = scale_exact &&
                          fused.state.amplitude(k).real() == fused_scaled.state.amplitude(k).real();
        }
    }

    bool raises = false;
    try {
        std::vector<SensorFrame> zero = random_frames(eng);
        for (auto& f : zero) std::fill(f.values.begin(), f.values.end(), 0.0);
        encode_frames(zero, AttentionWeights::ones(env::kSensorDims), 5);
    } catch (const AllZeroInput&) {
        raises = true;
    }

    const bool pass = max_err <= 1e-12 && tail_zero && scale_exact && raises;
    report(2, pass,
           fmt("encoding fidelity: amplitude error %.2e over 10^3 inputs (tol 1e-12), tail %s, "
               "x0.25 scale covariance %s, AllZeroInput %s",
               max_err, tail_zero ? "zero" : "DIRTY", scale_exact ? "bit-exact" : "BROKEN",
               raises ? "raised" : "MISSING"),
           t.secs());
}

// ---------------------------------------------------------------------------
// 3. Ansatz equals the brute-force dense matrix product of its gate list on
//    100 random (Q <= 4, L <= 3) instances within 1e-10 elementwise.
void criterion3() {
    Timer t;
    rng::Engine eng = rng::make_engine(33, 0);
    double max_err = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int q = 1 + trial % 4;
        const int depth = 1 + trial % 3;
        const CircuitParams params = random_circuit(depth, q, eng);
        const oracle::Vector start = oracle::random_state(q, eng);

        oracle::Vector reference = start;
        for (int layer = 0; layer < depth; ++layer) {
            for (int wire = 0; wire < q; ++wire) {
                reference = oracle::matvec(
                    oracle::embed_single(q, wire, oracle::ry2(params.theta(layer, wire))),
                    reference);
            }
            for (int wire = 0; wire + 1 < q; ++wire) {
                reference = oracle::matvec(oracle::cnot_matrix(q, wire, wire + 1), reference);
            }
        }

        const QuantumState got = apply_ansatz(QuantumState(q, start), params);
        for (std::size_t k = 0; k < got.dim(); ++k) {
            max_err = std::max(max_err, std::abs(got.amplitude(k) - reference[k]));
        }
    }
    report(3, max_err <= 1e-10,
           fmt("ansatz vs dense-matrix oracle: max elementwise error %.2e "
               "over 100 random (Q<=4, L<=3) circuits (tol 1e-10)", max_err),
           t.secs());
}

// ---------------------------------------------------------------------------
// 4. Parameter-shift gradients match central finite differences within 1e-6
//    relative (1e-8 absolute floor) on 100 random circuits; angles outside
//    the readout light-cone are flat within 1e-10.
void criterion4() {
    Timer t;
    rng::Engine eng = rng::make_engine(44, 0);
    double max_rel = 0.0;

    for (int trial = 0; trial < 100; ++trial) {
        const int q = 2 + trial % 4;
        const int depth = 1 + trial % 3;

        std::vector<SensorFrame> all = random_frames(eng);
        std::vector<SensorFrame> frames;
        if (q == 2) frames = {all[3]};                     // gps: 3 of 4 slots
        else if (q == 3) frames = {all[0]};                // lidar: 8 of 8
        else if (q == 4) frames = {all[0], all[1]};        // 12 of 16
        else frames = all;                                 // 25 of 32

        rl::Policy p{random_circuit(depth, q, eng), AttentionWeights::ones(env::kSensorDims),
                     1.0, q};
        p.attention.trainable = false;
        const int readout = static_cast<int>(rng::uniform_below(eng, q));
        const std::vector<double> shift = rl::parameter_shift_gradient(p, frames, readout);

        const double h = 1e-5;
        for (std::size_t i = 0; i < p.circuit.thetas.size(); ++i) {
            rl::Policy probe = p;
            probe.circuit.thetas[i] = p.circuit.thetas[i] + h;
            const double up = rl::policy_readout(probe, frames)[readout];
            probe.circuit.thetas[i] = p.circuit.thetas[i] - h;
            const double down = rl::policy_readout(probe, frames)[readout];
            const double fd = (up - down) / (2.0 * h);
            const double err = std::abs(shift[i] - fd);
            const double tol = std::max(1e-8, 1e-6 * std::abs(fd));
            max_rel = std::max(max_rel, err / tol);
        }
    }

    // Light cone: with the ascending entangler ladder, angle (l, w) cannot
    // reach readout r when w > r + (depth-1-l).
    double max_flat = 0.0;
    {
        const int depth = 3, q = 5;
        rl::Policy p{random_circuit(depth, q, eng), AttentionWeights::ones(env::kSensorDims),
                     1.0, q};
        p.attention.trainable = false;
        const std::vector<SensorFrame> frames = random_frames(eng);
        for (int readout : {0, 1}) {
            const std::vector<double> grad = rl::parameter_shift_gradient(p, frames, readout);
            for (int layer = 0; layer < depth; ++layer) {
                for (int wire = 0; wire < q; ++wire) {
                    if (wire > readout + (depth - 1 - layer)) {
                        max_flat = std::max(max_flat, std::abs(grad[layer * q + wire]));
                    }
                }
            }
        }
    }

    const bool pass = max_rel <= 1.0 && max_flat <= 1e-10;
    report(4, pass,
           fmt("parameter-shift vs finite differences: worst error %.3f of the "
               "max(1e-8, 1e-6*|fd|) budget over 100 circuits; light-cone zeros %.2e (tol 1e-10)",
               max_rel, max_flat),
           t.secs());
}

// ---------------------------------------------------------------------------
// 5. Learning signal: on the empty long road, the trained greedy policy's
//    mean return over 100 eval episodes reaches >= 2x the uniform-random
//    baseline (measured on the same episodes) within 500 training episodes
//    for >= 4 of seeds 0..4.
void criterion5() {
    Timer t;
    env::EnvConfig ec;
    ec.length = 500;
    ec.obstacle_density = 0.0;
    ec.rewards.step_cost = -0.5;

    rl::TrainConfig tc;
    tc.learning_rate = 0.005;
    tc.episodes_per_update = 25;
    tc.discount = 0.99;
    const int updates = 20;  // 20 x 25 = 500 training episodes

    int passing = 0;
    double random_mean_sum = 0.0, trained_mean_sum = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        rl::Policy policy = initial_policy(3, 5, 1.0, seed);
        rng::Engine episode_seeder = rng::make_engine(seed, 30);
        for (int u = 0; u < updates; ++u) {
            std::vector<rl::Trajectory> batch;
            batch.reserve(tc.episodes_per_update);
            for (int e = 0; e < tc.episodes_per_update; ++e) {
                batch.push_back(rl::run_episode(policy, ec, episode_seeder(),
                                                rl::RolloutMode::Sample, tc.discount));
            }
            policy = rl::reinforce_update(policy, batch, tc).policy;
        }

        rng::Engine eval_seeder = rng::make_engine(seed, 31);
        const std::vector<std::uint64_t> eval_seeds = draw_seeds(eval_seeder, 100);
        const double trained = greedy_mean(policy, ec, eval_seeds);

        double random_sum = 0.0;
        for (std::uint64_t es : eval_seeds) {
            env::Environment world(ec, es);
            env::StepResult cur = world.reset(es);
            rng::Engine actions = rng::make_engine(es, 3);
            double total = 0.0;
            int steps = 0;
            while (!cur.done && steps < rl::kMaxEpisodeSteps) {
                cur = world.step(static_cast<env::Action>(
                    rng::uniform_below(actions, env::kActionCount)));
                total += cur.reward;
                ++steps;
            }
            random_sum += total;
        }
        const double random_mean = random_sum / 100.0;
        random_mean_sum += random_mean;
        trained_mean_sum += trained;
        if (trained >= 2.0 * random_mean) ++passing;
    }

    report(5, passing >= 4,
           fmt("learning signal: %d/5 seeds reached 2x the uniform-random baseline "
               "(mean random %.1f -> threshold %.1f, mean trained %.1f) within 500 episodes "
               "(need >= 4)",
               passing, random_mean_sum / 5.0, 2.0 * random_mean_sum / 5.0, trained_mean_sum / 5.0),
           t.secs());
}

// ---------------------------------------------------------------------------
// 6. Attack/robust-objective reductions: single-step sign-gradient equals the
//    literal clamp01(x + eps*sign(grad)) formula bit-for-bit; a lambda=0
//    robust step equals the plain policy update bit-for-bit; the reported
//    total always equals clean + lambda * adv exactly.
void criterion6() {
    Timer t;
    rng::Engine eng = rng::make_engine(66, 0);
    bool pgd_exact = true;

    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<SensorFrame> frames = random_frames(eng);
        rl::Policy p{random_circuit(3, 5, eng), AttentionWeights::ones(env::kSensorDims),
                     2.0, env::kActionCount};
        p.attention.trainable = false;

        const std::vector<double> scores = rl::action_distribution(p, frames);
        const env::Action act = static_cast<env::Action>(
            std::max_element(scores.begin(), scores.end()) - scores.begin());
        const adv::LossFn loss = adv::nll_of_action(p, act);

        adv::AttackConfig cfg;
        cfg.epsilon = 0.05;
        cfg.steps = 1;
        cfg.step_size = 0.05;
        const adv::PerturbedFrames got = adv::pgd_perturb(frames, cfg, loss);

        const std::vector<std::vector<double>> grad = adv::input_gradient(frames, loss);
        for (std::size_t f = 0; f < frames.size(); ++f) {
            for (std::size_t c = 0; c < frames[f].values.size(); ++c) {
                const double g = grad[f][c];
                const double sg = (g > 0.0) ? 1.0 : (g < 0.0) ? -1.0 : 0.0;
                const double expected =
                    std::clamp(frames[f].values[c] + cfg.epsilon * sg, 0.0, 1.0);
                pgd_exact = pgd_exact && got.frames[f].values[c] == expected;
            }
        }
    }

    env::EnvConfig ec;  // defaults: short obstacle course
    rl::Policy p = initial_policy(3, 5, 2.0, 1);
    std::vector<rl::Trajectory> batch;
    for (std::uint64_t es : {101ull, 102ull, 103ull}) {
        batch.push_back(rl::run_episode(p, ec, es, rl::RolloutMode::Sample, 0.99));
    }
    rl::TrainConfig tc;
    adv::AttackConfig atk;

    const rl::UpdateResult plain = rl::reinforce_update(p, batch, tc);
    const adv::RobustStepResult zero = adv::robust_training_step(p, batch, 0.0, atk, tc);
    bool lambda0_exact = zero.policy.circuit.thetas == plain.policy.circuit.thetas;
    for (int m = 0; m < kModalityCount; ++m) {
        lambda0_exact = lambda0_exact &&
                        zero.policy.attention.weights[m] == plain.policy.attention.weights[m];
    }

    bool total_exact = true;
    for (double lambda : {0.0, 0.5, 1.0, 2.5}) {
        const adv::RobustStepResult r = adv::robust_training_step(p, batch, lambda, atk, tc);
        total_exact = total_exact &&
                      r.report.total == r.report.clean_loss + lambda * r.report.adv_loss;
    }

    const bool pass = pgd_exact && lambda0_exact && total_exact;
    report(6, pass,
           fmt("attack reductions: single-step sign-gradient %s the literal formula, "
               "lambda=0 robust step %s the plain update, total==clean+lambda*adv %s",
               pgd_exact ? "matches" : "DIVERGES FROM",
               lambda0_exact ? "matches" : "DIVERGES FROM",
               total_exact ? "exact" : "BROKEN"),
           t.secs());
}

// ---------------------------------------------------------------------------
// 7. Robustness ordering: from a shared pretrained base per seed, fine-tune a
//    clean (lambda=0) and a robust (lambda=1) policy on the same episode
//    seeds, then compare the absolute return degradation under a PGD
//    eps=0.05 input attack over 100 eval episodes. The robust policy's
//    degradation must not exceed the clean policy's for >= 3 of seeds 0..4.
void criterion7() {
    Timer t;
    env::EnvConfig ec;
    ec.length = 100;
    ec.obstacle_density = 0.05;
    ec.max_speed = 1;
    ec.rewards.collision = -20.0;
    ec.rewards.step_cost = -0.3;

    adv::AttackConfig eval_atk;
    eval_atk.epsilon = 0.05;
    eval_atk.steps = 3;
    eval_atk.step_size = 0.025;
    adv::AttackConfig train_atk;
    train_atk.epsilon = 0.05;
    train_atk.steps = 1;
    train_atk.step_size = 0.05;

    const int search_trials = 800, updates = 16, batch_size = 25, depth = 6;
    rl::TrainConfig tc;
    tc.learning_rate = 0.0005;
    tc.episodes_per_update = batch_size;
    tc.discount = 0.95;

    const auto attacked_mean = [&](const rl::Policy& p,
                                   const std::vector<std::uint64_t>& seeds) {
        double sum = 0.0;
        for (std::uint64_t es : seeds) {
            env::Environment world(ec, es);
            env::StepResult cur = world.reset(es);
            double total = 0.0;
            int steps = 0;
            while (!cur.done && steps < rl::kMaxEpisodeSteps) {
                const adv::PerturbedFrames pf = adv::pgd_perturb(p, cur.frames, eval_atk);
                const std::vector<double> z = rl::policy_readout(p, pf.frames);
                const int act = static_cast<int>(
                    std::max_element(z.begin(), z.begin() + p.action_count) - z.begin());
                cur = world.step(static_cast<env::Action>(act));
                total += cur.reward;
                ++steps;
            }
            sum += total;
        }
        return sum / static_cast<double>(seeds.size());
    };

    int ordered = 0;
    std::string clean_list, robust_list;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        // Pretrain: seeded random search for a competent base policy.
        rng::Engine search_rng = rng::make_engine(seed, 6);
        rng::Engine probe_rng = rng::make_engine(seed, 7);
        const std::vector<std::uint64_t> probe_seeds = draw_seeds(probe_rng, 16);
        rl::Policy base{CircuitParams(depth, 5), AttentionWeights::ones(env::kSensorDims),
                        4.0, env::kActionCount};
        base.attention.trainable = false;
        double best = -std::numeric_limits<double>::infinity();
        for (int trial = 0; trial < search_trials; ++trial) {
            rl::Policy cand = base;
            cand.circuit = random_circuit(depth, 5, search_rng);
            const double score = greedy_mean(cand, ec, probe_seeds);
            if (score > best) {
                best = score;
                base.circuit = cand.circuit;
            }
        }

        // Fine-tune both variants from the same base on the same episodes.
        rng::Engine episode_rng = rng::make_engine(seed, 30);
        rl::Policy clean = base;
        rl::Policy robust = base;
        for (int u = 0; u < updates; ++u) {
            const std::vector<std::uint64_t> ep_seeds = draw_seeds(episode_rng, batch_size);
            std::vector<rl::Trajectory> clean_batch, robust_batch;
            clean_batch.reserve(batch_size);
            robust_batch.reserve(batch_size);
            for (std::uint64_t es : ep_seeds) {
                clean_batch.push_back(
                    rl::run_episode(clean, ec, es, rl::RolloutMode::Sample, tc.discount));
                robust_batch.push_back(
                    rl::run_episode(robust, ec, es, rl::RolloutMode::Sample, tc.discount));
            }
            clean = rl::reinforce_update(clean, clean_batch, tc).policy;
            robust = adv::robust_training_step(robust, robust_batch, 1.0, train_atk, tc).policy;
        }

        rng::Engine eval_rng = rng::make_engine(seed, 31);
        const std::vector<std::uint64_t> eval_seeds = draw_seeds(eval_rng, 100);
        const double clean_deg = greedy_mean(clean, ec, eval_seeds) -
                                 attacked_mean(clean, eval_seeds);
        const double robust_deg = greedy_mean(robust, ec, eval_seeds) -
                                  attacked_mean(robust, eval_seeds);
        if (robust_deg <= clean_deg) ++ordered;
        clean_list += fmt("%s%.1f", seed ? "/" : "", clean_deg);
        robust_list += fmt("%s%.1f", seed ? "/" : "", robust_deg);
    }

    report(7, ordered >= 3,
           fmt("robustness ordering at eps=0.05: robust degradation <= clean for %d/5 seeds "
               "(clean %s vs robust %s return drop; need >= 3)",
               ordered, clean_list.c_str(), robust_list.c_str()),
           t.secs());
}

// ---------------------------------------------------------------------------
// 8. Secure-bus protocol suite: handshake + 2^10 lossless frames, every
//    single-bit tamper of the sealed region -> TagMismatch, every replay ->
//    ReplayDetected, forged hello -> SignatureInvalid, golden wire vectors
//    match, 10^5-input parser fuzz with zero crashes.
void criterion8() {
    Timer t;
    const bus::CryptoSuite& suite = bus::test_suite();

    bus::SensorRegistry registry;
    rng::Engine provision_rng = rng::make_engine(81, 42);
    const bus::SensorProvision keys = bus::provision_sensor(registry, suite, 257, provision_rng);
    bus::SessionState sensor = bus::make_sensor_session(257, suite.suite_id, keys.sig_secret_key,
                                                        keys.kem_secret_key, 82);
    bus::SessionState processor = bus::make_processor_session(83);
    const bus::SecureFrame hello = bus::handshake_hello(sensor);
    bus::handshake_complete(sensor, bus::handshake_respond(processor, hello, registry));

    rng::Engine eng = rng::make_engine(84, 0);
    int lossless = 0;
    for (int i = 0; i < 1024; ++i) {
        bus::Bytes payload(i % 48);
        rng::fill_bytes(eng, payload.data(), payload.size());
        const bus::SecureFrame frame = bus::seal_frame(sensor, payload);
        const bus::SecureFrame rewired = bus::parse_frame(bus::serialize_frame(frame));
        if (bus::open_frame(processor, rewired) == payload) ++lossless;
    }

    int tampered_caught = 0;
    const int tamper_trials = 1000;
    for (int i = 0; i < tamper_trials; ++i) {
        bus::Bytes payload(1 + i % 48);
        rng::fill_bytes(eng, payload.data(), payload.size());
        const bus::SecureFrame frame = bus::seal_frame(sensor, payload);
        bus::Bytes wire = bus::serialize_frame(frame);
        const std::size_t sealed_bits = (payload.size() + bus::kTagSize) * 8;
        const std::size_t bit = rng::uniform_below(eng, sealed_bits);
        wire[bus::kHeaderSize + bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        try {
            bus::open_frame(processor, bus::parse_frame(wire));
        } catch (const bus::TagMismatch&) {
            ++tampered_caught;
        } catch (...) {
        }
        bus::open_frame(processor, frame);  // intact copy still opens
    }

    int replays_caught = 0;
    const int replay_trials = 200;
    for (int i = 0; i < replay_trials; ++i) {
        bus::Bytes payload{static_cast<std::uint8_t>(i)};
        const bus::SecureFrame frame = bus::seal_frame(sensor, payload);
        bus::open_frame(processor, frame);
        try {
            bus::open_frame(processor, frame);
        } catch (const bus::ReplayDetected&) {
            ++replays_caught;
        } catch (...) {
        }
    }

    bool forged_caught = false;
    {
        bus::SensorRegistry throwaway;
        rng::Engine mallory_rng = rng::make_engine(85, 42);
        const bus::SensorProvision mallory =
            bus::provision_sensor(throwaway, suite, 257, mallory_rng);
        bus::SessionState impostor = bus::make_sensor_session(
            257, suite.suite_id, mallory.sig_secret_key, mallory.kem_secret_key, 86);
        bus::SessionState fresh_processor = bus::make_processor_session(87);
        try {
            bus::handshake_respond(fresh_processor, bus::handshake_hello(impostor), registry);
        } catch (const bus::SignatureInvalid&) {
            forged_caught = true;
        } catch (...) {
        }
    }

    // Golden wire vectors: rebuild the frozen transcript and diff.
    bool golden_ok = true;
    std::string golden_note = "match";
    {
        bus::SensorRegistry golden_registry;
        rng::Engine golden_rng = rng::make_engine(2024, 42);
        const bus::SensorProvision golden_keys =
            bus::provision_sensor(golden_registry, suite, 257, golden_rng);
        bus::SessionState gs = bus::make_sensor_session(257, suite.suite_id,
                                                        golden_keys.sig_secret_key,
                                                        golden_keys.kem_secret_key, 7);
        bus::SessionState gp = bus::make_processor_session(8);
        std::vector<std::pair<std::string, std::string>> transcript;
        const bus::SecureFrame ghello = bus::handshake_hello(gs);
        transcript.emplace_back("hello", hashing::hex_encode(bus::serialize_frame(ghello)));
        const bus::SecureFrame gresp = bus::handshake_respond(gp, ghello, golden_registry);
        transcript.emplace_back("kem_response", hashing::hex_encode(bus::serialize_frame(gresp)));
        bus::handshake_complete(gs, gresp);
        transcript.emplace_back("session_key", hashing::hex_encode(gs.session_key));
        const std::vector<std::string> payloads = {"lidar:0.271828", "radar:0.314159", ""};
        for (std::size_t i = 0; i < payloads.size(); ++i) {
            const bus::Bytes plaintext(payloads[i].begin(), payloads[i].end());
            transcript.emplace_back("data_" + std::to_string(i + 1),
                                    hashing::hex_encode(bus::serialize_frame(
                                        bus::seal_frame(gs, plaintext))));
        }

        std::ifstream in(QNAV_TEST_DATA_DIR "/bus_golden_vectors.txt");
        if (!in.good()) {
            golden_ok = false;
            golden_note = "FILE MISSING";
        } else {
            std::vector<std::pair<std::string, std::string>> file_lines;
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#') continue;
                const auto space = line.find(' ');
                if (space == std::string::npos) continue;
                file_lines.emplace_back(line.substr(0, space), line.substr(space + 1));
            }
            golden_ok = file_lines == transcript;
            if (!golden_ok) golden_note = "DIVERGED";
        }
    }

    // Parser fuzz: random blobs plus mutations of a valid frame.
    int fuzz_survived = 0;
    {
        rng::Engine fuzz = rng::make_engine(99, 0);
        bus::Bytes blob(1024);
        for (int i = 0; i < 60000; ++i) {
            const std::size_t len = rng::uniform_below(fuzz, blob.size());
            rng::fill_bytes(fuzz, blob.data(), len);
            try {
                bus::parse_frame(blob.data(), len);
            } catch (const bus::MalformedFrame&) {
            }
            ++fuzz_survived;
        }
        bus::SecureFrame seed_frame;
        seed_frame.msg_type = bus::MsgType::Data;
        seed_frame.sensor_id = 300;
        seed_frame.sequence = 12;
        seed_frame.nonce = bus::make_nonce(300, 12);
        const std::string text = "payload-bytes-here";
        seed_frame.payload.assign(text.begin(), text.end());
        const bus::Bytes good = bus::serialize_frame(seed_frame);
        for (int i = 0; i < 40000; ++i) {
            bus::Bytes mutated = good;
            const int op = static_cast<int>(rng::uniform_below(fuzz, 3));
            if (op == 0) {
                mutated[rng::uniform_below(fuzz, mutated.size())] ^=
                    static_cast<std::uint8_t>(1u << rng::uniform_below(fuzz, 8));
            } else if (op == 1) {
                mutated.resize(rng::uniform_below(fuzz, mutated.size() + 1));
            } else {
                mutated.insert(mutated.end(), 1 + rng::uniform_below(fuzz, 32), 0xaa);
            }
            try {
                bus::parse_frame(mutated);
            } catch (const bus::MalformedFrame&) {
            }
            ++fuzz_survived;
        }
    }

    const bool pass = lossless == 1024 && tampered_caught == tamper_trials &&
                      replays_caught == replay_trials && forged_caught && golden_ok &&
                      fuzz_survived == 100000;
    report(8, pass,
           fmt("secure bus: %d/1024 frames lossless, %d/%d bit-tampers -> TagMismatch, "
               "%d/%d replays -> ReplayDetected, forged hello %s, golden vectors %s, "
               "fuzz %d/100000 inputs without crash",
               lossless, tampered_caught, tamper_trials, replays_caught, replay_trials,
               forged_caught ? "-> SignatureInvalid" : "ACCEPTED", golden_note.c_str(),
               fuzz_survived),
           t.secs());
}

// ---------------------------------------------------------------------------
// 9. Latency: the secured decision tick (seal -> open -> encode -> ansatz ->
//    action) stays under 50 ms at p99 for Q=5, L=3 over 10^3 ticks.
void criterion9() {
    Timer t;
    const bus::CryptoSuite& suite = bus::test_suite();
    bus::SensorRegistry registry;
    rng::Engine provision_rng = rng::make_engine(91, 42);
    const bus::SensorProvision keys = bus::provision_sensor(registry, suite, 1, provision_rng);
    bus::SessionState sensor = bus::make_sensor_session(1, suite.suite_id, keys.sig_secret_key,
                                                        keys.kem_secret_key, 92);
    bus::SessionState processor = bus::make_processor_session(93);
    bus::handshake_complete(sensor,
                            bus::handshake_respond(processor, bus::handshake_hello(sensor),
                                                   registry));

    const rl::Policy policy = initial_policy(3, 5, 2.0, 0);
    env::EnvConfig ec;
    env::Environment world(ec, 9);
    env::StepResult cur = world.reset(9);

    const int warmup = 50, measured = 1000;
    std::vector<double> tick_ms;
    tick_ms.reserve(measured);
    for (int tick = 0; tick < warmup + measured; ++tick) {
        const auto t0 = std::chrono::steady_clock::now();

        bus::Bytes payload;
        for (const SensorFrame& f : cur.frames) {
            for (double v : f.values) {
                std::uint64_t bits;
                std::memcpy(&bits, &v, sizeof bits);
                for (int b = 0; b < 8; ++b) {
                    payload.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
                }
            }
        }
        const bus::SecureFrame frame = bus::seal_frame(sensor, payload);
        const bus::Bytes opened = bus::open_frame(processor, frame);

        std::vector<SensorFrame> received = cur.frames;
        std::size_t at = 0;
        for (SensorFrame& f : received) {
            for (double& v : f.values) {
                std::uint64_t bits = 0;
                for (int b = 0; b < 8; ++b) {
                    bits |= static_cast<std::uint64_t>(opened[at + b]) << (8 * b);
                }
                at += 8;
                std::memcpy(&v, &bits, sizeof v);
            }
        }
        const FusedState fused =
            encode_frames(received, policy.attention, policy.circuit.num_qubits);
        const QuantumState evolved = apply_ansatz(fused, policy.circuit);
        const std::vector<double> z = extract_features(evolved);
        const std::vector<double> scores =
            rl::softmax_scores(z, policy.softmax_temperature, policy.action_count);
        const int act = static_cast<int>(
            std::max_element(scores.begin(), scores.end()) - scores.begin());

        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0).count();
        if (tick >= warmup) tick_ms.push_back(ms);

        cur = world.step(static_cast<env::Action>(act));
        if (cur.done) cur = world.reset(9 + tick);
    }

    std::sort(tick_ms.begin(), tick_ms.end());
    const double p50 = tick_ms[tick_ms.size() / 2];
    const double p99 = tick_ms[static_cast<std::size_t>(0.99 * (tick_ms.size() - 1))];
    report(9, p99 < 50.0,
           fmt("secured decision tick at Q=5, L=3: p50 %.3f ms, p99 %.3f ms over 1000 ticks "
               "(bound 50 ms)", p50, p99),
           t.secs());
}

// ---------------------------------------------------------------------------
// 10. Determinism: two CLI train runs with the same config and seed produce
//     byte-identical metrics CSVs (and checkpoints).
void criterion10(const char* qnav_path) {
    Timer t;
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "qnav-acceptance";
    std::error_code ec;
    fs::remove_all(root, ec);
    fs::create_directories(root / "a");
    fs::create_directories(root / "b");

    const fs::path config_path = root / "train.json";
    {
        std::ofstream cfg(config_path);
        cfg << "{\n"
               "  \"environment\": {\"length\": 40},\n"
               "  \"navq\": {\"updates\": 3, \"episodes_per_update\": 4}\n"
               "}\n";
    }

    const auto run = [&](const char* out) {
        const std::string cmd = std::string("QNAV_LOG=quiet \"") + qnav_path +
                                "\" train --config \"" + config_path.string() + "\" --seed 7" +
                                " --out \"" + (root / out).string() + "\" >/dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    const int rc_a = run("a");
    const int rc_b = run("b");

    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    const std::string metrics_a = slurp(root / "a" / "metrics.csv");
    const std::string metrics_b = slurp(root / "b" / "metrics.csv");
    const std::string ckpt_a = slurp(root / "a" / "checkpoint.txt");
    const std::string ckpt_b = slurp(root / "b" / "checkpoint.txt");

    const bool ran = rc_a == 0 && rc_b == 0 && !metrics_a.empty() && !ckpt_a.empty();
    const bool pass = ran && metrics_a == metrics_b && ckpt_a == ckpt_b;
    report(10, pass,
           fmt("determinism: repeated `train --seed 7` runs -> metrics.csv %s (%zu bytes), "
               "checkpoint %s",
               metrics_a == metrics_b && ran ? "byte-identical" : "DIFFER", metrics_a.size(),
               ckpt_a == ckpt_b && ran ? "byte-identical" : "DIFFER"),
           t.secs());
    fs::remove_all(root, ec);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-qnav-cli>\n");
        return 2;
    }
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10(argv[1]);
    std::printf("%s: %d of 10 criteria passed\n", g_failures == 0 ? "OK" : "FAILED",
                10 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
