#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnav/statevector.hpp"

namespace qnav {

// Sensor modalities, in the fixed order used for the encoding layout.
enum class Modality : int { Lidar = 0, Radar = 1, Camera = 2, Gps = 3, Weather = 4 };
constexpr int kModalityCount = 5;

const char* modality_name(Modality m);
Modality modality_from_name(const std::string& name);

// One modality's normalized reading vector at a point in time.
// Every component must be finite and within [0, 1].
struct SensorFrame {
    Modality modality = Modality::Lidar;
    std::vector<double> values;
    std::int64_t timestamp_us = 0;
};

void validate_frame(const SensorFrame& frame);

// Per-component multipliers applied to sensor values before encoding.
// Shapes mirror the frames they weight.
struct AttentionWeights {
    std::array<std::vector<double>, kModalityCount> weights;
    bool trainable = true;

    static AttentionWeights ones(const std::array<int, kModalityCount>& dims);
    std::vector<double>& for_modality(Modality m) { return weights[static_cast<int>(m)]; }
    const std::vector<double>& for_modality(Modality m) const {
        return weights[static_cast<int>(m)];
    }
    int total_components() const;
};

// Trainable angles of the layered circuit: depth x num_qubits, row-major by
// layer.
struct CircuitParams {
    int depth = 0;
    int num_qubits = 0;
    std::vector<double> thetas;

    CircuitParams() = default;
    CircuitParams(int depth, int num_qubits);

    double& theta(int layer, int qubit) { return thetas[layer * num_qubits + qubit]; }
    double theta(int layer, int qubit) const { return thetas[layer * num_qubits + qubit]; }
    void validate() const;
};

// Injective assignment of (modality, component) pairs to consecutive basis
// indices, modalities in enum order starting at index 0.
struct EncodingLayout {
    std::array<int, kModalityCount> offset{};  // -1 when the modality is absent
    std::array<int, kModalityCount> dim{};
    int total = 0;

    int index(Modality m, int component) const {
        return offset[static_cast<int>(m)] + component;
    }
    bool has(Modality m) const { return offset[static_cast<int>(m)] >= 0; }
};

// Result of amplitude-encoding a set of frames: unit state plus the
// normalization and layout needed to read amplitudes back.
struct FusedState {
    QuantumState state;
    double norm_factor = 0.0;  // N, the sum of squared weighted components
    EncodingLayout layout;
};

struct AllZeroInput : std::runtime_error {
    AllZeroInput() : std::runtime_error("all weighted sensor components are zero; state cannot be normalized") {}
};

struct CapacityExceeded : std::runtime_error {
    explicit CapacityExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Amplitude encoding: amplitude at layout(i, j) is w_ij / sqrt(N) where
// w_ij = weight * value and N = sum of w_ij^2. Unused tail amplitudes stay
// zero. Frames may arrive in any order but each modality at most once.
FusedState encode_frames(const std::vector<SensorFrame>& frames, const AttentionWeights& weights,
                         int num_qubits);

// One layer per depth step: RY(theta[l][q]) on every qubit, then a CNOT
// ladder (q, q+1) for q ascending. No entanglers on a single qubit.
QuantumState apply_ansatz(const FusedState& fused, const CircuitParams& params);
QuantumState apply_ansatz(const QuantumState& state, const CircuitParams& params);

// Per-qubit Z expectations, length num_qubits, each in [-1, 1].
std::vector<double> extract_features(const QuantumState& state);

}  // namespace qnav
