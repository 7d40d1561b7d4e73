#include "qnav/environment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qnav::env {

namespace {

const char* kActionNames[kActionCount] = {"steer_left", "steer_right", "keep_lane", "accelerate",
                                          "brake"};

// Lidar ray directions as (dlane, dcell); index 0 is straight ahead.
constexpr std::array<std::array<int, 2>, 8> kLidarRays = {{
    {0, 1},    // forward
    {-1, 1},   // forward-left
    {1, 1},    // forward-right
    {-1, 0},   // left
    {1, 0},    // right
    {-1, -1},  // rear-left
    {1, -1},   // rear-right
    {0, -1},   // rear
}};

constexpr int kObstacleClearance = 3;  // cells 0..2 stay free so spawns are safe
constexpr std::int64_t kTickMicros = 100000;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

const char* action_name(Action a) { return kActionNames[static_cast<int>(a)]; }

void EnvConfig::validate() const {
    if (lanes < 3) throw std::invalid_argument("environment.lanes must be at least 3");
    if (length < 20) throw std::invalid_argument("environment.length must be at least 20");
    if (!(obstacle_density >= 0.0 && obstacle_density <= 0.3)) {
        throw std::invalid_argument("environment.obstacle_density must be in [0, 0.3]");
    }
    if (!(weather_factor >= 0.0 && weather_factor <= 1.0)) {
        throw std::invalid_argument("environment.weather_factor must be in [0, 1]");
    }
    if (!(noise_std >= 0.0 && noise_std <= 1.0)) {
        throw std::invalid_argument("environment.noise_std must be in [0, 1]");
    }
    if (max_speed < 1 || max_speed > 5) {
        throw std::invalid_argument("environment.max_speed must be in [1, 5]");
    }
    if (lidar_range < 1) throw std::invalid_argument("environment.lidar_range must be positive");
    if (radar_range < 1) throw std::invalid_argument("environment.radar_range must be positive");
    if (!std::isfinite(rewards.progress_per_cell) || !std::isfinite(rewards.collision) ||
        !std::isfinite(rewards.goal) || !std::isfinite(rewards.step_cost)) {
        throw std::invalid_argument("environment.rewards must be finite");
    }
}

Environment::Environment(const EnvConfig& config, std::uint64_t seed)
    : config_(config), noise_rng_(rng::make_engine(seed, 1)) {
    config_.validate();
    reset(seed);
}

StepResult Environment::reset(std::uint64_t seed) {
    world_ = WorldState{};
    world_.lanes = config_.lanes;
    world_.length = config_.length;
    world_.rng_seed = seed;
    world_.weather_factor = config_.weather_factor;
    world_.goal_cell = config_.length - 1;
    world_.grid.assign(static_cast<std::size_t>(config_.lanes) * config_.length, 0);

    // Obstacles skip the spawn clearance and the goal row.
    rng::Engine layout_rng = rng::make_engine(seed, 0);
    for (int lane = 0; lane < config_.lanes; ++lane) {
        for (int cell = kObstacleClearance; cell < config_.length - 1; ++cell) {
            if (rng::uniform01(layout_rng) < config_.obstacle_density) {
                world_.grid[static_cast<std::size_t>(lane) * config_.length + cell] = 1;
            }
        }
    }

    world_.vehicle = VehicleState{config_.lanes / 2, 0, 1};
    noise_rng_ = rng::make_engine(seed, 1);
    done_ = false;
    steps_ = 0;

    StepResult result;
    result.frames = render_frames();
    return result;
}

StepResult Environment::step(Action action) {
    if (done_) throw StepAfterDone();

    VehicleState& v = world_.vehicle;
    switch (action) {
        case Action::SteerLeft:
            v.lane = std::max(0, v.lane - 1);
            break;
        case Action::SteerRight:
            v.lane = std::min(config_.lanes - 1, v.lane + 1);
            break;
        case Action::Accelerate:
            v.speed = std::min(config_.max_speed, v.speed + 1);
            break;
        case Action::Brake:
            v.speed = std::max(0, v.speed - 1);
            break;
        case Action::KeepLane:
            break;
    }

    StepResult result;
    int advanced = 0;

    if (world_.occupied(v.lane, v.cell)) {
        // Steered directly into an occupied cell: side collision, no advance.
        result.collision = true;
    } else {
        while (advanced < v.speed) {
            ++v.cell;
            ++advanced;
            if (world_.occupied(v.lane, v.cell)) {
                result.collision = true;
                break;
            }
            if (v.cell >= world_.goal_cell) {
                result.goal_reached = true;
                break;
            }
        }
    }

    result.reward = config_.rewards.progress_per_cell * advanced + config_.rewards.step_cost;
    if (result.collision) result.reward += config_.rewards.collision;
    if (result.goal_reached) result.reward += config_.rewards.goal;
    result.done = result.collision || result.goal_reached;
    done_ = result.done;
    ++steps_;

    result.frames = render_frames();
    return result;
}

std::vector<SensorFrame> Environment::render_frames() {
    const VehicleState& v = world_.vehicle;
    const std::int64_t now = static_cast<std::int64_t>(steps_) * kTickMicros;
    std::vector<SensorFrame> frames;
    frames.reserve(kModalityCount);

    // Lidar: distance in cells to the first obstacle along each ray,
    // normalized by lidar_range. Rays that exit the grid read max range.
    {
        SensorFrame f{Modality::Lidar, std::vector<double>(kSensorDims[0], 1.0), now};
        for (std::size_t r = 0; r < kLidarRays.size(); ++r) {
            for (int t = 1; t <= config_.lidar_range; ++t) {
                const int lane = v.lane + kLidarRays[r][0] * t;
                const int cell = v.cell + kLidarRays[r][1] * t;
                if (lane < 0 || lane >= config_.lanes || cell < 0 || cell >= config_.length) break;
                if (world_.occupied(lane, cell)) {
                    f.values[r] = static_cast<double>(t) / config_.lidar_range;
                    break;
                }
            }
        }
        add_noise(f.values);
        frames.push_back(std::move(f));
    }

    // Radar: (range, closing speed) for the two nearest obstacles at or ahead
    // of the vehicle. Obstacles are static, so closing speed is own speed.
    {
        SensorFrame f{Modality::Radar, std::vector<double>(kSensorDims[1], 0.0), now};
        std::vector<double> dists;
        const int scan_end = std::min(config_.length, v.cell + config_.radar_range + 1);
        for (int lane = 0; lane < config_.lanes; ++lane) {
            for (int cell = v.cell; cell < scan_end; ++cell) {
                if (!world_.occupied(lane, cell)) continue;
                const double dl = lane - v.lane;
                const double dc = cell - v.cell;
                const double d = std::sqrt(dl * dl + dc * dc);
                if (d <= config_.radar_range) dists.push_back(d);
            }
        }
        std::sort(dists.begin(), dists.end());
        const double speed_norm = static_cast<double>(v.speed) / config_.max_speed;
        for (int k = 0; k < 2; ++k) {
            if (static_cast<std::size_t>(k) < dists.size()) {
                f.values[2 * k] = dists[k] / config_.radar_range;
                f.values[2 * k + 1] = speed_norm;
            } else {
                f.values[2 * k] = 1.0;
                f.values[2 * k + 1] = 0.0;
            }
        }
        add_noise(f.values);
        frames.push_back(std::move(f));
    }

    // Camera: occupancy of the next 8 cells in the current lane.
    {
        SensorFrame f{Modality::Camera, std::vector<double>(kSensorDims[2], 0.0), now};
        for (int k = 0; k < kSensorDims[2]; ++k) {
            f.values[k] = world_.occupied(v.lane, v.cell + 1 + k) ? 1.0 : 0.0;
        }
        add_noise(f.values);
        frames.push_back(std::move(f));
    }

    // GPS: normalized (lane, longitudinal position, speed).
    {
        SensorFrame f{Modality::Gps, std::vector<double>(kSensorDims[3], 0.0), now};
        f.values[0] = static_cast<double>(v.lane) / (config_.lanes - 1);
        f.values[1] = static_cast<double>(v.cell) / (config_.length - 1);
        f.values[2] = static_cast<double>(v.speed) / config_.max_speed;
        add_noise(f.values);
        frames.push_back(std::move(f));
    }

    // Weather: the factor itself plus the noise scale currently in effect.
    // Reported exactly, never noised.
    {
        SensorFrame f{Modality::Weather, std::vector<double>(kSensorDims[4], 0.0), now};
        f.values[0] = world_.weather_factor;
        f.values[1] = config_.noise_std * world_.weather_factor;
        frames.push_back(std::move(f));
    }

    return frames;
}

void Environment::add_noise(std::vector<double>& values) {
    if (world_.weather_factor <= 0.0) return;
    const double sigma = config_.noise_std * world_.weather_factor;
    for (double& v : values) {
        v = clamp01(v + sigma * rng::normal(noise_rng_));
    }
}

}  // namespace qnav::env
