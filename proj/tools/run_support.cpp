#include "run_support.hpp"

#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "qnav/bus_frame.hpp"
#include "qnav/checkpoint.hpp"
#include "qnav/rng.hpp"

namespace qnav::cli {

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("QNAV_LOG");
        if (env == nullptr) return LogLevel::Info;
        const std::string v = env;
        if (v == "quiet") return LogLevel::Quiet;
        if (v == "debug") return LogLevel::Debug;
        return LogLevel::Info;
    }();
    return level;
}

void log_info(const std::string& line) {
    if (log_level() >= LogLevel::Info) std::cerr << "[qnav] " << line << '\n';
}

void log_debug(const std::string& line) {
    if (log_level() >= LogLevel::Debug) std::cerr << "[qnav] " << line << '\n';
}

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

rl::Policy initial_policy(const cfg::ExperimentConfig& config) {
    rl::Policy policy;
    policy.circuit = CircuitParams(config.depth, config.num_qubits);
    rng::Engine eng = rng::make_engine(config.rng_seed, 20);
    for (double& theta : policy.circuit.thetas) {
        theta = (rng::uniform01(eng) - 0.5) * 0.25 * M_PI;
    }
    policy.attention = AttentionWeights::ones(config.modality_dims);
    policy.attention.trainable = config.attention_trainable;
    policy.softmax_temperature = config.softmax_temperature;
    policy.validate();
    return policy;
}

rl::Policy policy_from_checkpoint(const cfg::ExperimentConfig& config,
                                  const std::string& checkpoint_path) {
    const ckpt::Checkpoint loaded = ckpt::load_file(checkpoint_path);
    if (loaded.circuit.depth != config.depth ||
        loaded.circuit.num_qubits != config.num_qubits) {
        throw cfg::ConfigError("checkpoint '" + checkpoint_path + "' holds a " +
                               std::to_string(loaded.circuit.depth) + "x" +
                               std::to_string(loaded.circuit.num_qubits) +
                               " circuit but fusion config says " +
                               std::to_string(config.depth) + "x" +
                               std::to_string(config.num_qubits));
    }
    for (int m = 0; m < kModalityCount; ++m) {
        const auto idx = static_cast<std::size_t>(m);
        const auto got = loaded.attention.weights[idx].size();
        const auto want = static_cast<std::size_t>(config.modality_dims[idx]);
        if (got != want) {
            throw cfg::ConfigError("checkpoint '" + checkpoint_path + "' stores " +
                                   std::to_string(got) + " " +
                                   modality_name(static_cast<Modality>(m)) +
                                   " weights but fusion config says " + std::to_string(want));
        }
    }
    rl::Policy policy;
    policy.circuit = loaded.circuit;
    policy.attention = loaded.attention;
    policy.attention.trainable = config.attention_trainable;
    policy.softmax_temperature = config.softmax_temperature;
    policy.validate();
    return policy;
}

EpisodeStats run_greedy_episode(const rl::Policy& policy, const env::EnvConfig& env_config,
                                std::uint64_t env_seed, const FrameFilter& filter) {
    // Mirrors the construction/reset/observation sequence of the library's
    // rollout so greedy returns here match rl::run_episode exactly.
    env::Environment world(env_config, env_seed);
    env::StepResult current = world.reset(env_seed);
    EpisodeStats stats;
    while (!current.done && stats.steps < rl::kMaxEpisodeSteps) {
        const std::vector<SensorFrame> observed =
            filter ? filter(current.frames, stats.steps) : current.frames;
        const std::vector<double> probs = rl::action_distribution(policy, observed);
        int best = 0;
        for (int a = 1; a < static_cast<int>(probs.size()); ++a) {
            if (probs[static_cast<std::size_t>(a)] > probs[static_cast<std::size_t>(best)]) {
                best = a;
            }
        }
        current = world.step(static_cast<env::Action>(best));
        stats.total_reward += current.reward;
        stats.steps += 1;
        stats.goal = current.goal_reached;
        stats.collision = current.collision;
    }
    return stats;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out.good()) throw std::runtime_error("write to '" + path.string() + "' failed");
}

void write_run_manifest(const cfg::ExperimentConfig& config, const std::string& command,
                        const std::filesystem::path& out_dir) {
    nlohmann::json manifest = {
        {"command", command},
        {"config_hash", cfg::config_hash(config)},
        {"seed", config.rng_seed},
        {"versions",
         {{"qnav", "1.0.0"},
          {"checkpoint_format", 1},
          {"wire_format", static_cast<int>(bus::kWireVersion)}}},
    };
    write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    write_text_file(out_dir / "config_effective.json", cfg::config_to_json(config));
}

bus::Bytes encode_sensor_payload(const std::vector<SensorFrame>& frames) {
    bus::Bytes out;
    for (const SensorFrame& frame : frames) {
        out.push_back(static_cast<std::uint8_t>(frame.modality));
        const auto count = static_cast<std::uint16_t>(frame.values.size());
        out.push_back(static_cast<std::uint8_t>(count & 0xff));
        out.push_back(static_cast<std::uint8_t>(count >> 8));
        for (double v : frame.values) {
            std::uint64_t bits = 0;
            std::memcpy(&bits, &v, sizeof(bits));
            for (int b = 0; b < 8; ++b) {
                out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
            }
        }
    }
    return out;
}

std::vector<SensorFrame> decode_sensor_payload(const bus::Bytes& payload) {
    std::vector<SensorFrame> frames;
    std::size_t pos = 0;
    while (pos < payload.size()) {
        if (payload.size() - pos < 3) {
            throw std::runtime_error("sensor payload truncated at a frame header");
        }
        SensorFrame frame;
        const int modality = payload[pos];
        if (modality >= kModalityCount) {
            throw std::runtime_error("sensor payload names an unknown modality");
        }
        frame.modality = static_cast<Modality>(modality);
        const std::size_t count = payload[pos + 1] | (payload[pos + 2] << 8);
        pos += 3;
        if (payload.size() - pos < count * 8) {
            throw std::runtime_error("sensor payload truncated inside a frame body");
        }
        frame.values.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            std::uint64_t bits = 0;
            for (int b = 7; b >= 0; --b) bits = (bits << 8) | payload[pos + i * 8 + b];
            std::memcpy(&frame.values[i], &bits, sizeof(double));
        }
        pos += count * 8;
        frames.push_back(std::move(frame));
    }
    return frames;
}

namespace {

void write_all(int fd, const std::uint8_t* data, std::size_t size) {
    std::size_t sent = 0;
    while (sent < size) {
        const ssize_t n = ::write(fd, data + sent, size - sent);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw std::runtime_error(std::string("socket write failed: ") + std::strerror(errno));
        }
        sent += static_cast<std::size_t>(n);
    }
}

void read_exact(int fd, std::uint8_t* data, std::size_t size) {
    std::size_t got = 0;
    while (got < size) {
        const ssize_t n = ::read(fd, data + got, size - got);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw std::runtime_error(std::string("socket read failed: ") + std::strerror(errno));
        }
        if (n == 0) throw std::runtime_error("socket closed mid-frame");
        got += static_cast<std::size_t>(n);
    }
}

}  // namespace

void send_frame(int fd, const bus::SecureFrame& frame) {
    const bus::Bytes wire = bus::serialize_frame(frame);
    write_all(fd, wire.data(), wire.size());
}

bus::SecureFrame recv_frame(int fd) {
    bus::Bytes wire(bus::kHeaderSize);
    read_exact(fd, wire.data(), wire.size());
    // The header's msg_type and payload_len say how much body follows.
    const std::uint8_t msg_type = wire[3];
    std::uint32_t payload_len = 0;
    for (int i = 3; i >= 0; --i) payload_len = (payload_len << 8) | wire[27 + i];
    if (payload_len > bus::kMaxPayload) {
        throw bus::MalformedFrame("payload_len exceeds the frame cap");
    }
    const std::size_t body =
        payload_len + (msg_type == static_cast<std::uint8_t>(bus::MsgType::Data)
                           ? bus::kTagSize
                           : 0);
    wire.resize(bus::kHeaderSize + body);
    read_exact(fd, wire.data() + bus::kHeaderSize, body);
    return bus::parse_frame(wire);
}

}  // namespace qnav::cli
