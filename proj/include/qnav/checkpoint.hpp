#pragma once

#include <stdexcept>
#include <string>

#include "qnav/fusion.hpp"

namespace qnav::ckpt {

// Learned parameters in a line-oriented text file (version header "QNAVCKPT 1"):
//
//   QNAVCKPT 1
//   qubits <Q>
//   depth <L>
//   theta <L*Q angles, layer-major, %.17g>
//   alpha <modality> <d> <d weights, %.17g>     (one line per present modality,
//                                                enum order, dim-0 omitted)
//
// %.17g keeps every double bit-exact through a save/load round trip, so a
// checkpoint written on one machine replays identically on another.
struct CheckpointError : std::runtime_error {
    explicit CheckpointError(const std::string& what)
        : std::runtime_error("checkpoint: " + what) {}
};

struct Checkpoint {
    CircuitParams circuit;
    AttentionWeights attention;
};

std::string to_text(const CircuitParams& circuit, const AttentionWeights& attention);
Checkpoint from_text(const std::string& text);

void save_file(const std::string& path, const CircuitParams& circuit,
               const AttentionWeights& attention);
Checkpoint load_file(const std::string& path);

}  // namespace qnav::ckpt
