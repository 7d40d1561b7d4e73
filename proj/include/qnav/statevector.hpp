#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qnav/rng.hpp"

namespace qnav {

using Complex = std::complex<double>;

// Exact dense statevector over Q qubits (2^Q complex amplitudes).
// Qubit 0 is the least significant bit of the basis index, so for Q=2 the
// amplitude order is |q1 q0> = |00>, |01>, |10>, |11>.
class QuantumState {
public:
    explicit QuantumState(int num_qubits);
    QuantumState(int num_qubits, std::vector<Complex> amplitudes);

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amplitudes_.size(); }
    const std::vector<Complex>& amplitudes() const { return amplitudes_; }
    const Complex& amplitude(std::size_t basis_index) const { return amplitudes_.at(basis_index); }

    double norm_squared() const;

private:
    int num_qubits_;
    std::vector<Complex> amplitudes_;

    friend QuantumState prepare_basis(std::uint64_t index, int num_qubits);
    friend QuantumState apply_ry(const QuantumState& state, int qubit, double angle);
    friend QuantumState apply_cnot(const QuantumState& state, int control, int target);
};

// |index> on num_qubits wires.
QuantumState prepare_basis(std::uint64_t index, int num_qubits);

// Single-qubit Y rotation with matrix
//   [[cos(a/2), -sin(a/2)],
//    [sin(a/2),  cos(a/2)]].
QuantumState apply_ry(const QuantumState& state, int qubit, double angle);

// Flips the target bit on every basis state whose control bit is set.
QuantumState apply_cnot(const QuantumState& state, int control, int target);

// <Z_qubit> = sum over basis states of (+1 if the qubit's bit is 0 else -1)
// times the state's probability there. Always in [-1, 1].
double expectation_z(const QuantumState& state, int qubit);

// Born-rule sample of a basis index. Deterministic for a fixed engine state.
std::uint64_t sample_basis(const QuantumState& state, rng::Engine& eng);
std::uint64_t sample_basis(const QuantumState& state, std::uint64_t rng_seed);

}  // namespace qnav
