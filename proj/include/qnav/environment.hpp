#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qnav/fusion.hpp"
#include "qnav/rng.hpp"

namespace qnav::env {

// Discrete navigation commands.
enum class Action : int {
    SteerLeft = 0,
    SteerRight = 1,
    KeepLane = 2,
    Accelerate = 3,
    Brake = 4,
};
constexpr int kActionCount = 5;
const char* action_name(Action a);

struct RewardConfig {
    double progress_per_cell = 1.0;
    double collision = -20.0;
    double goal = 50.0;
    double step_cost = -0.1;
};

struct EnvConfig {
    int lanes = 3;                   // grid width W, at least 3
    int length = 40;                 // grid length H in cells, at least 20
    double obstacle_density = 0.15;  // in [0, 0.3]
    double weather_factor = 0.0;     // in [0, 1], scales sensor noise
    double noise_std = 0.05;         // base Gaussian sigma, scaled by weather_factor
    int max_speed = 2;
    int lidar_range = 8;
    int radar_range = 10;
    RewardConfig rewards;

    void validate() const;
};

// Fixed per-modality reading widths produced by render_frames.
constexpr std::array<int, kModalityCount> kSensorDims = {8, 4, 8, 3, 2};

struct VehicleState {
    int lane = 0;
    int cell = 0;
    int speed = 1;
};

struct WorldState {
    int lanes = 0;
    int length = 0;
    std::vector<std::uint8_t> grid;  // lanes x length occupancy, row-major by lane
    VehicleState vehicle;
    int goal_cell = 0;
    double weather_factor = 0.0;
    std::uint64_t rng_seed = 0;

    // False outside the grid.
    bool occupied(int lane, int cell) const {
        if (lane < 0 || lane >= lanes || cell < 0 || cell >= length) return false;
        return grid[static_cast<std::size_t>(lane) * length + cell] != 0;
    }
};

struct StepResult {
    std::vector<SensorFrame> frames;
    double reward = 0.0;
    bool done = false;
    bool collision = false;
    bool goal_reached = false;
};

struct StepAfterDone : std::runtime_error {
    StepAfterDone() : std::runtime_error("step called on a finished episode") {}
};

// Deterministic lane-grid world. Obstacles are static; the vehicle holds a
// lane index, a longitudinal cell, and a speed in {0..max_speed}. An episode
// ends on collision or on reaching the last cell.
class Environment {
public:
    Environment(const EnvConfig& config, std::uint64_t seed);

    StepResult reset(std::uint64_t seed);
    StepResult step(Action action);

    // Sensor readings for the current state. Weather-scaled Gaussian noise is
    // drawn from the environment's noise stream; weather_factor 0 is exact.
    std::vector<SensorFrame> render_frames();

    const WorldState& world() const { return world_; }
    const EnvConfig& config() const { return config_; }
    bool done() const { return done_; }
    int steps_taken() const { return steps_; }

private:
    EnvConfig config_;
    WorldState world_;
    rng::Engine noise_rng_;
    bool done_ = false;
    int steps_ = 0;

    void add_noise(std::vector<double>& values);
};

}  // namespace qnav::env
