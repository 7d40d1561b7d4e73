#include "qnav/fusion.hpp"

#include <cmath>
#include <numeric>

namespace qnav {

namespace {
const char* kModalityNames[kModalityCount] = {"lidar", "radar", "camera", "gps", "weather"};
}

const char* modality_name(Modality m) { return kModalityNames[static_cast<int>(m)]; }

Modality modality_from_name(const std::string& name) {
    for (int i = 0; i < kModalityCount; ++i) {
        if (name == kModalityNames[i]) return static_cast<Modality>(i);
    }
    throw std::invalid_argument("unknown modality name: " + name);
}

void validate_frame(const SensorFrame& frame) {
    for (std::size_t j = 0; j < frame.values.size(); ++j) {
        const double v = frame.values[j];
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw std::invalid_argument(std::string(modality_name(frame.modality)) +
                                        " component " + std::to_string(j) +
                                        " is outside [0, 1]");
        }
    }
}

AttentionWeights AttentionWeights::ones(const std::array<int, kModalityCount>& dims) {
    AttentionWeights w;
    for (int i = 0; i < kModalityCount; ++i) {
        w.weights[i].assign(static_cast<std::size_t>(dims[i]), 1.0);
    }
    return w;
}

int AttentionWeights::total_components() const {
    int total = 0;
    for (const auto& w : weights) total += static_cast<int>(w.size());
    return total;
}

CircuitParams::CircuitParams(int depth_, int num_qubits_)
    : depth(depth_), num_qubits(num_qubits_) {
    if (depth < 1 || num_qubits < 1) {
        throw std::invalid_argument("circuit depth and qubit count must be positive");
    }
    thetas.assign(static_cast<std::size_t>(depth) * num_qubits, 0.0);
}

void CircuitParams::validate() const {
    if (depth < 1 || num_qubits < 1) {
        throw std::invalid_argument("circuit depth and qubit count must be positive");
    }
    if (thetas.size() != static_cast<std::size_t>(depth) * num_qubits) {
        throw std::invalid_argument("theta grid shape does not match depth x num_qubits");
    }
    for (double t : thetas) {
        if (!std::isfinite(t)) throw std::invalid_argument("non-finite circuit parameter");
    }
}

FusedState encode_frames(const std::vector<SensorFrame>& frames, const AttentionWeights& weights,
                         int num_qubits) {
    // Collect frames in fixed modality order; duplicates are a caller bug.
    std::array<const SensorFrame*, kModalityCount> by_modality{};
    for (const SensorFrame& f : frames) {
        auto& slot = by_modality[static_cast<int>(f.modality)];
        if (slot != nullptr) {
            throw std::invalid_argument(std::string("duplicate frame for modality ") +
                                        modality_name(f.modality));
        }
        validate_frame(f);
        slot = &f;
    }

    EncodingLayout layout;
    layout.offset.fill(-1);
    layout.dim.fill(0);
    for (int i = 0; i < kModalityCount; ++i) {
        const SensorFrame* f = by_modality[i];
        if (f == nullptr) continue;
        const auto& alpha = weights.weights[i];
        if (alpha.size() != f->values.size()) {
            throw std::invalid_argument(std::string("attention weight shape for ") +
                                        kModalityNames[i] + " does not match frame length");
        }
        layout.offset[i] = layout.total;
        layout.dim[i] = static_cast<int>(f->values.size());
        layout.total += layout.dim[i];
    }
    if (layout.total == 0) throw AllZeroInput();

    const std::uint64_t capacity = std::uint64_t{1} << num_qubits;
    if (static_cast<std::uint64_t>(layout.total) > capacity) {
        throw CapacityExceeded("sensor components (" + std::to_string(layout.total) +
                               ") exceed state capacity 2^" + std::to_string(num_qubits) + " = " +
                               std::to_string(capacity));
    }

    std::vector<double> weighted(static_cast<std::size_t>(layout.total), 0.0);
    double norm_factor = 0.0;
    for (int i = 0; i < kModalityCount; ++i) {
        const SensorFrame* f = by_modality[i];
        if (f == nullptr) continue;
        const auto& alpha = weights.weights[i];
        for (std::size_t j = 0; j < f->values.size(); ++j) {
            if (!std::isfinite(alpha[j])) {
                throw std::invalid_argument("non-finite attention weight");
            }
            const double w = alpha[j] * f->values[j];
            weighted[layout.offset[i] + j] = w;
            norm_factor += w * w;
        }
    }
    if (norm_factor == 0.0) throw AllZeroInput();

    const double inv_root = 1.0 / std::sqrt(norm_factor);
    std::vector<Complex> amps(capacity, Complex{0.0, 0.0});
    for (int k = 0; k < layout.total; ++k) {
        amps[k] = Complex{weighted[k] * inv_root, 0.0};
    }
    return FusedState{QuantumState(num_qubits, std::move(amps)), norm_factor, layout};
}

QuantumState apply_ansatz(const QuantumState& state, const CircuitParams& params) {
    params.validate();
    if (params.num_qubits != state.num_qubits()) {
        throw std::invalid_argument("circuit qubit count " + std::to_string(params.num_qubits) +
                                    " does not match state qubit count " +
                                    std::to_string(state.num_qubits()));
    }
    QuantumState out = state;
    for (int l = 0; l < params.depth; ++l) {
        for (int q = 0; q < params.num_qubits; ++q) {
            out = apply_ry(out, q, params.theta(l, q));
        }
        for (int q = 0; q + 1 < params.num_qubits; ++q) {
            out = apply_cnot(out, q, q + 1);
        }
    }
    return out;
}

QuantumState apply_ansatz(const FusedState& fused, const CircuitParams& params) {
    return apply_ansatz(fused.state, params);
}

std::vector<double> extract_features(const QuantumState& state) {
    std::vector<double> features(static_cast<std::size_t>(state.num_qubits()));
    for (int q = 0; q < state.num_qubits(); ++q) {
        features[q] = expectation_z(state, q);
    }
    return features;
}

}  // namespace qnav
