#include "qnav/statevector.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qnav {

namespace {

constexpr int kMaxQubits = 24;  // dense simulation only; 2^24 amplitudes is the ceiling

void check_qubit_count(int num_qubits) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw std::invalid_argument("num_qubits must be in [1, " + std::to_string(kMaxQubits) +
                                    "], got " + std::to_string(num_qubits));
    }
}

void check_qubit_index(const QuantumState& state, int qubit, const char* what) {
    if (qubit < 0 || qubit >= state.num_qubits()) {
        throw std::out_of_range(std::string(what) + " qubit index " + std::to_string(qubit) +
                                " out of range for " + std::to_string(state.num_qubits()) +
                                " qubits");
    }
}

}  // namespace

QuantumState::QuantumState(int num_qubits) : num_qubits_(num_qubits) {
    check_qubit_count(num_qubits);
    amplitudes_.assign(std::size_t{1} << num_qubits, Complex{0.0, 0.0});
    amplitudes_[0] = Complex{1.0, 0.0};
}

QuantumState::QuantumState(int num_qubits, std::vector<Complex> amplitudes)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {
    check_qubit_count(num_qubits);
    if (amplitudes_.size() != (std::size_t{1} << num_qubits)) {
        throw std::invalid_argument("amplitude vector length " +
                                    std::to_string(amplitudes_.size()) + " does not equal 2^" +
                                    std::to_string(num_qubits));
    }
    if (std::abs(norm_squared() - 1.0) > 1e-10) {
        throw std::invalid_argument("amplitude vector is not unit norm");
    }
}

double QuantumState::norm_squared() const {
    double n = 0.0;
    for (const Complex& a : amplitudes_) n += std::norm(a);
    return n;
}

QuantumState prepare_basis(std::uint64_t index, int num_qubits) {
    check_qubit_count(num_qubits);
    const std::uint64_t dim = std::uint64_t{1} << num_qubits;
    if (index >= dim) {
        throw std::out_of_range("basis index " + std::to_string(index) + " out of range for " +
                                std::to_string(num_qubits) + " qubits");
    }
    QuantumState state(num_qubits);
    state.amplitudes_[0] = Complex{0.0, 0.0};
    state.amplitudes_[index] = Complex{1.0, 0.0};
    return state;
}

QuantumState apply_ry(const QuantumState& state, int qubit, double angle) {
    check_qubit_index(state, qubit, "RY");
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    QuantumState out = state;
    const std::uint64_t bit = std::uint64_t{1} << qubit;
    const std::uint64_t dim = out.dim();
    for (std::uint64_t i = 0; i < dim; ++i) {
        if (i & bit) continue;
        const Complex a0 = out.amplitudes_[i];
        const Complex a1 = out.amplitudes_[i | bit];
        out.amplitudes_[i] = c * a0 - s * a1;
        out.amplitudes_[i | bit] = s * a0 + c * a1;
    }
    return out;
}

QuantumState apply_cnot(const QuantumState& state, int control, int target) {
    check_qubit_index(state, control, "CNOT control");
    check_qubit_index(state, target, "CNOT target");
    if (control == target) {
        throw std::invalid_argument("CNOT control and target must differ");
    }
    QuantumState out = state;
    const std::uint64_t cbit = std::uint64_t{1} << control;
    const std::uint64_t tbit = std::uint64_t{1} << target;
    const std::uint64_t dim = out.dim();
    for (std::uint64_t i = 0; i < dim; ++i) {
        if ((i & cbit) && !(i & tbit)) {
            std::swap(out.amplitudes_[i], out.amplitudes_[i | tbit]);
        }
    }
    return out;
}

double expectation_z(const QuantumState& state, int qubit) {
    check_qubit_index(state, qubit, "expectation_z");
    const std::uint64_t bit = std::uint64_t{1} << qubit;
    double value = 0.0;
    const auto& amps = state.amplitudes();
    for (std::uint64_t i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps[i]);
        value += (i & bit) ? -p : p;
    }
    return value;
}

std::uint64_t sample_basis(const QuantumState& state, rng::Engine& eng) {
    const double u = rng::uniform01(eng);
    double cumulative = 0.0;
    const auto& amps = state.amplitudes();
    std::uint64_t last_nonzero = 0;
    for (std::uint64_t i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps[i]);
        if (p > 0.0) last_nonzero = i;
        cumulative += p;
        if (u < cumulative) return i;
    }
    // u can graze past the accumulated total by rounding; land on the last
    // basis state carrying probability.
    return last_nonzero;
}

std::uint64_t sample_basis(const QuantumState& state, std::uint64_t rng_seed) {
    rng::Engine eng = rng::make_engine(rng_seed);
    return sample_basis(state, eng);
}

}  // namespace qnav
