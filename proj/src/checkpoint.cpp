#include "qnav/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qnav::ckpt {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& token, const std::string& where) {
    const char* begin = token.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw CheckpointError(where + ": '" + token + "' is not a number");
    }
    return v;
}

long parse_int(const std::string& token, const std::string& where) {
    const char* begin = token.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0') {
        throw CheckpointError(where + ": '" + token + "' is not an integer");
    }
    return v;
}

std::vector<std::string> split_tokens(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> tokens;
    std::string token;
    while (in >> token) tokens.push_back(token);
    return tokens;
}

}  // namespace

std::string to_text(const CircuitParams& circuit, const AttentionWeights& attention) {
    circuit.validate();
    std::ostringstream out;
    out << "QNAVCKPT 1\n";
    out << "qubits " << circuit.num_qubits << '\n';
    out << "depth " << circuit.depth << '\n';
    out << "theta";
    for (double theta : circuit.thetas) out << ' ' << fmt_double(theta);
    out << '\n';
    for (int m = 0; m < kModalityCount; ++m) {
        const auto& w = attention.weights[m];
        if (w.empty()) continue;
        out << "alpha " << modality_name(static_cast<Modality>(m)) << ' ' << w.size();
        for (double v : w) out << ' ' << fmt_double(v);
        out << '\n';
    }
    return out.str();
}

Checkpoint from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;

    if (!std::getline(in, line) || line != "QNAVCKPT 1") {
        throw CheckpointError("first line must be the version header 'QNAVCKPT 1'");
    }

    auto expect_keyword_int = [&](const std::string& keyword) -> long {
        if (!std::getline(in, line)) throw CheckpointError("missing '" + keyword + "' line");
        const auto tokens = split_tokens(line);
        if (tokens.size() != 2 || tokens[0] != keyword) {
            throw CheckpointError("expected '" + keyword + " <value>', got '" + line + "'");
        }
        return parse_int(tokens[1], keyword);
    };

    const long qubits = expect_keyword_int("qubits");
    const long depth = expect_keyword_int("depth");
    if (qubits < 1 || qubits > 30) throw CheckpointError("qubits out of range");
    if (depth < 1) throw CheckpointError("depth must be positive");

    if (!std::getline(in, line)) throw CheckpointError("missing 'theta' line");
    auto tokens = split_tokens(line);
    const std::size_t want = static_cast<std::size_t>(depth) * static_cast<std::size_t>(qubits);
    if (tokens.empty() || tokens[0] != "theta" || tokens.size() != 1 + want) {
        throw CheckpointError("theta line must carry depth*qubits = " + std::to_string(want) +
                              " angles");
    }
    Checkpoint loaded;
    loaded.circuit = CircuitParams(static_cast<int>(depth), static_cast<int>(qubits));
    for (std::size_t i = 0; i < want; ++i) {
        loaded.circuit.thetas[i] = parse_double(tokens[1 + i], "theta");
    }

    std::array<bool, kModalityCount> seen{};
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        tokens = split_tokens(line);
        if (tokens[0] != "alpha" || tokens.size() < 3) {
            throw CheckpointError("unexpected line '" + line + "'");
        }
        Modality m;
        try {
            m = modality_from_name(tokens[1]);
        } catch (const std::exception& e) {
            throw CheckpointError(std::string("alpha: ") + e.what());
        }
        const int idx = static_cast<int>(m);
        if (seen[idx]) throw CheckpointError("alpha " + tokens[1] + " appears twice");
        seen[idx] = true;
        const long dim = parse_int(tokens[2], "alpha " + tokens[1]);
        if (dim < 1 || tokens.size() != 3 + static_cast<std::size_t>(dim)) {
            throw CheckpointError("alpha " + tokens[1] + " declares " + tokens[2] +
                                  " weights but carries " + std::to_string(tokens.size() - 3));
        }
        auto& w = loaded.attention.weights[idx];
        w.resize(static_cast<std::size_t>(dim));
        for (long i = 0; i < dim; ++i) {
            w[static_cast<std::size_t>(i)] =
                parse_double(tokens[3 + static_cast<std::size_t>(i)], "alpha " + tokens[1]);
        }
    }
    return loaded;
}

void save_file(const std::string& path, const CircuitParams& circuit,
               const AttentionWeights& attention) {
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) throw CheckpointError("cannot open '" + path + "' for writing");
    out << to_text(circuit, attention);
    if (!out.good()) throw CheckpointError("write to '" + path + "' failed");
}

Checkpoint load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw CheckpointError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_text(buffer.str());
}

}  // namespace qnav::ckpt
