#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "qnav/bus_frame.hpp"
#include "qnav/config.hpp"
#include "qnav/policy.hpp"

namespace qnav::cli {

// Verbosity from the QNAV_LOG environment variable: "quiet", "info" (default)
// or "debug". Logs go to stderr; stdout carries the machine-readable summary.
enum class LogLevel : int { Quiet = 0, Info = 1, Debug = 2 };
LogLevel log_level();
void log_info(const std::string& line);
void log_debug(const std::string& line);

// Shortest round-trip-exact decimal form of a double, for CSV cells.
std::string fmt17(double v);

// Policy with seeded starting parameters: angles uniform in [-pi/8, pi/8)
// from the run seed, attention weights all one.
rl::Policy initial_policy(const cfg::ExperimentConfig& config);

// Loads a checkpoint and mounts it on the config's architecture; throws
// cfg::ConfigError when the stored shapes do not match the config.
rl::Policy policy_from_checkpoint(const cfg::ExperimentConfig& config,
                                  const std::string& checkpoint_path);

void write_text_file(const std::filesystem::path& path, const std::string& content);

// Greedy rollout with direct environment access, so the end state is read
// from the simulator instead of being inferred from rewards. The filter, when
// set, rewrites the observation before the policy sees it (attack injection);
// the environment always advances on its true state.
struct EpisodeStats {
    double total_reward = 0.0;
    int steps = 0;
    bool goal = false;
    bool collision = false;
};
using FrameFilter =
    std::function<std::vector<SensorFrame>(const std::vector<SensorFrame>&, int step)>;
EpisodeStats run_greedy_episode(const rl::Policy& policy, const env::EnvConfig& env_config,
                                std::uint64_t env_seed, const FrameFilter& filter = {});

// manifest.json + config_effective.json: config hash, seed, and format
// versions. Content is deterministic so reruns are byte-identical.
void write_run_manifest(const cfg::ExperimentConfig& config, const std::string& command,
                        const std::filesystem::path& out_dir);

// Sensor-reading payload codec for bus transport: per frame, one byte of
// modality, a little-endian u16 component count, then the components as
// little-endian IEEE doubles.
bus::Bytes encode_sensor_payload(const std::vector<SensorFrame>& frames);
std::vector<SensorFrame> decode_sensor_payload(const bus::Bytes& payload);

// Blocking whole-frame transport over a stream socket; recv reads the fixed
// header first and then exactly the advertised body.
void send_frame(int fd, const bus::SecureFrame& frame);
bus::SecureFrame recv_frame(int fd);

}  // namespace qnav::cli
