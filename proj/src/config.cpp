#include "qnav/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qnav/bus_suite.hpp"
#include "qnav/hashing.hpp"

namespace qnav::cfg {

namespace {

using nlohmann::json;

// A JSON object plus the dotted path that reached it; all lookups report
// errors against that path.
class Section {
public:
    Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(path_ + ": expected a JSON object");
    }

    std::string at(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    void check_keys(std::initializer_list<const char*> allowed) const {
        for (const auto& [key, value] : obj_.items()) {
            (void)value;
            bool known = false;
            for (const char* a : allowed) known = known || key == a;
            if (!known) throw ConfigError(at(key) + ": unknown field");
        }
    }

    bool has(const char* key) const { return obj_.contains(key); }

    Section sub(const char* key) const {
        return has(key) ? Section(obj_.at(key), at(key)) : Section(kEmpty, at(key));
    }

    int get_int(const char* key, int def) const {
        if (!has(key)) return def;
        const json& v = obj_.at(key);
        if (!v.is_number_integer()) throw ConfigError(at(key) + ": expected an integer");
        return v.get<int>();
    }

    std::uint64_t get_u64(const char* key, std::uint64_t def) const {
        if (!has(key)) return def;
        const json& v = obj_.at(key);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                       v.get<std::int64_t>() < 0)) {
            throw ConfigError(at(key) + ": expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    double get_double(const char* key, double def) const {
        if (!has(key)) return def;
        const json& v = obj_.at(key);
        if (!v.is_number()) throw ConfigError(at(key) + ": expected a number");
        return v.get<double>();
    }

    bool get_bool(const char* key, bool def) const {
        if (!has(key)) return def;
        const json& v = obj_.at(key);
        if (!v.is_boolean()) throw ConfigError(at(key) + ": expected true or false");
        return v.get<bool>();
    }

    std::string get_string(const char* key, const std::string& def) const {
        if (!has(key)) return def;
        const json& v = obj_.at(key);
        if (!v.is_string()) throw ConfigError(at(key) + ": expected a string");
        return v.get<std::string>();
    }

    const json& raw(const char* key) const { return obj_.at(key); }

private:
    static const json kEmpty;
    const json& obj_;
    std::string path_;
};

const json Section::kEmpty = json::object();

void read_environment(const Section& root, env::EnvConfig& out) {
    const Section s = root.sub("environment");
    s.check_keys({"lanes", "length", "obstacle_density", "weather_factor", "noise_std",
                  "max_speed", "lidar_range", "radar_range", "rewards"});
    out.lanes = s.get_int("lanes", out.lanes);
    out.length = s.get_int("length", out.length);
    out.obstacle_density = s.get_double("obstacle_density", out.obstacle_density);
    out.weather_factor = s.get_double("weather_factor", out.weather_factor);
    out.noise_std = s.get_double("noise_std", out.noise_std);
    out.max_speed = s.get_int("max_speed", out.max_speed);
    out.lidar_range = s.get_int("lidar_range", out.lidar_range);
    out.radar_range = s.get_int("radar_range", out.radar_range);
    const Section r = s.sub("rewards");
    r.check_keys({"progress_per_cell", "collision", "goal", "step_cost"});
    out.rewards.progress_per_cell = r.get_double("progress_per_cell", out.rewards.progress_per_cell);
    out.rewards.collision = r.get_double("collision", out.rewards.collision);
    out.rewards.goal = r.get_double("goal", out.rewards.goal);
    out.rewards.step_cost = r.get_double("step_cost", out.rewards.step_cost);
}

void read_fusion(const Section& root, ExperimentConfig& out) {
    const Section s = root.sub("fusion");
    s.check_keys({"num_qubits", "depth", "modality_dims", "softmax_temperature",
                  "attention_trainable"});
    out.num_qubits = s.get_int("num_qubits", out.num_qubits);
    out.depth = s.get_int("depth", out.depth);
    out.softmax_temperature = s.get_double("softmax_temperature", out.softmax_temperature);
    out.attention_trainable = s.get_bool("attention_trainable", out.attention_trainable);
    if (s.has("modality_dims")) {
        const Section d = s.sub("modality_dims");
        d.check_keys({"lidar", "radar", "camera", "gps", "weather"});
        for (int m = 0; m < kModalityCount; ++m) {
            const char* name = modality_name(static_cast<Modality>(m));
            out.modality_dims[static_cast<std::size_t>(m)] =
                d.get_int(name, out.modality_dims[static_cast<std::size_t>(m)]);
        }
    }
}

void read_navq(const Section& root, ExperimentConfig& out) {
    const Section s = root.sub("navq");
    s.check_keys({"learning_rate", "episodes_per_update", "baseline", "discount", "updates"});
    out.train.learning_rate = s.get_double("learning_rate", out.train.learning_rate);
    out.train.episodes_per_update =
        s.get_int("episodes_per_update", out.train.episodes_per_update);
    out.train.discount = s.get_double("discount", out.train.discount);
    out.updates = s.get_int("updates", out.updates);
    const std::string baseline = s.get_string(
        "baseline", out.train.baseline == rl::Baseline::MeanReturn ? "mean_return" : "none");
    if (baseline == "mean_return") {
        out.train.baseline = rl::Baseline::MeanReturn;
    } else if (baseline == "none") {
        out.train.baseline = rl::Baseline::None;
    } else {
        throw ConfigError(s.at("baseline") + ": must be 'mean_return' or 'none'");
    }
}

void read_adversarial(const Section& root, ExperimentConfig& out) {
    const Section s = root.sub("adversarial");
    s.check_keys({"lambda", "epsilon", "steps", "step_size", "target_modalities",
                  "eval_epsilons", "eval_episodes"});
    out.lambda = s.get_double("lambda", out.lambda);
    out.attack.epsilon = s.get_double("epsilon", out.attack.epsilon);
    out.attack.steps = s.get_int("steps", out.attack.steps);
    out.attack.step_size = s.get_double("step_size", out.attack.step_size);
    out.eval_episodes = s.get_int("eval_episodes", out.eval_episodes);
    if (s.has("target_modalities")) {
        const json& v = s.raw("target_modalities");
        if (!v.is_array()) {
            throw ConfigError(s.at("target_modalities") + ": expected an array of names");
        }
        out.attack.target_modalities = {false, false, false, false, false};
        for (const json& item : v) {
            if (!item.is_string()) {
                throw ConfigError(s.at("target_modalities") + ": expected an array of names");
            }
            try {
                const Modality m = modality_from_name(item.get<std::string>());
                out.attack.target_modalities[static_cast<std::size_t>(m)] = true;
            } catch (const std::exception& e) {
                throw ConfigError(s.at("target_modalities") + ": " + e.what());
            }
        }
    }
    if (s.has("eval_epsilons")) {
        const json& v = s.raw("eval_epsilons");
        if (!v.is_array() || v.empty()) {
            throw ConfigError(s.at("eval_epsilons") + ": expected a non-empty array of numbers");
        }
        out.eval_epsilons.clear();
        for (const json& item : v) {
            if (!item.is_number()) {
                throw ConfigError(s.at("eval_epsilons") + ": expected a non-empty array of numbers");
            }
            out.eval_epsilons.push_back(item.get<double>());
        }
    }
}

void read_securebus(const Section& root, ExperimentConfig& out) {
    const Section s = root.sub("securebus");
    s.check_keys({"suite_id", "registry_path", "per_frame_signature"});
    const int suite = s.get_int("suite_id", out.suite_id);
    if (suite < 0 || suite > 255) throw ConfigError(s.at("suite_id") + ": must fit in a byte");
    out.suite_id = static_cast<std::uint8_t>(suite);
    out.registry_path = s.get_string("registry_path", out.registry_path);
    out.per_frame_signature = s.get_bool("per_frame_signature", out.per_frame_signature);
}

}  // namespace

void ExperimentConfig::validate() const {
    try {
        environment.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("environment: ") + e.what());
    }

    if (num_qubits < 1 || num_qubits > 24) {
        throw ConfigError("fusion.num_qubits: must be in [1, 24] for dense simulation");
    }
    if (depth < 1) throw ConfigError("fusion.depth: must be at least 1");
    if (!(softmax_temperature > 0.0) || !std::isfinite(softmax_temperature)) {
        throw ConfigError("fusion.softmax_temperature: must be positive and finite");
    }

    long total = 0;
    for (int m = 0; m < kModalityCount; ++m) {
        const auto idx = static_cast<std::size_t>(m);
        if (modality_dims[idx] < 0) {
            throw ConfigError(std::string("fusion.modality_dims.") +
                              modality_name(static_cast<Modality>(m)) + ": must be >= 0");
        }
        if (modality_dims[idx] != env::kSensorDims[idx]) {
            throw ConfigError(std::string("fusion.modality_dims.") +
                              modality_name(static_cast<Modality>(m)) + ": environment emits " +
                              std::to_string(env::kSensorDims[idx]) + " components");
        }
        total += modality_dims[idx];
    }
    const long capacity = num_qubits >= 24 ? (1L << 24) : (1L << num_qubits);
    if (total > capacity) {
        throw ConfigError("fusion.num_qubits: modality dims sum to " + std::to_string(total) +
                          " but 2^" + std::to_string(num_qubits) + " = " +
                          std::to_string(capacity) + " basis states are available");
    }
    if (env::kActionCount > num_qubits) {
        throw ConfigError("fusion.num_qubits: needs one readout qubit per action (" +
                          std::to_string(env::kActionCount) + ")");
    }

    try {
        train.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("navq: ") + e.what());
    }
    if (updates < 1) throw ConfigError("navq.updates: must be at least 1");

    try {
        attack.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("adversarial: ") + e.what());
    }
    if (lambda < 0.0 || !std::isfinite(lambda)) {
        throw ConfigError("adversarial.lambda: must be non-negative and finite");
    }
    if (attack.epsilon > 1.0) {
        throw ConfigError("adversarial.epsilon: must lie in [0, 1] in normalized sensor units");
    }
    for (double eps : eval_epsilons) {
        if (!(eps >= 0.0 && eps <= 1.0)) {
            throw ConfigError("adversarial.eval_epsilons: values must lie in [0, 1]");
        }
    }
    if (eval_episodes < 1) throw ConfigError("adversarial.eval_episodes: must be at least 1");

    if (bus::find_suite(suite_id) == nullptr) {
        throw ConfigError("securebus.suite_id: suite " + std::to_string(suite_id) +
                          " is not compiled in");
    }
}

ExperimentConfig config_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    const Section top(root, "");
    top.check_keys({"environment", "fusion", "navq", "adversarial", "securebus", "rng_seed",
                    "output_dir"});

    ExperimentConfig out;
    read_environment(top, out.environment);
    read_fusion(top, out);
    read_navq(top, out);
    read_adversarial(top, out);
    read_securebus(top, out);
    out.rng_seed = top.get_u64("rng_seed", out.rng_seed);
    out.output_dir = top.get_string("output_dir", out.output_dir);

    // One seed drives the whole run; the per-module seeds derive from it.
    out.train.rng_seed = out.rng_seed;
    out.attack.rng_seed = out.rng_seed;

    out.validate();
    return out;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return config_from_json(buffer.str());
}

std::string config_to_json(const ExperimentConfig& config) {
    json rewards = {
        {"progress_per_cell", config.environment.rewards.progress_per_cell},
        {"collision", config.environment.rewards.collision},
        {"goal", config.environment.rewards.goal},
        {"step_cost", config.environment.rewards.step_cost},
    };
    json environment = {
        {"lanes", config.environment.lanes},
        {"length", config.environment.length},
        {"obstacle_density", config.environment.obstacle_density},
        {"weather_factor", config.environment.weather_factor},
        {"noise_std", config.environment.noise_std},
        {"max_speed", config.environment.max_speed},
        {"lidar_range", config.environment.lidar_range},
        {"radar_range", config.environment.radar_range},
        {"rewards", rewards},
    };
    json dims = json::object();
    for (int m = 0; m < kModalityCount; ++m) {
        dims[modality_name(static_cast<Modality>(m))] =
            config.modality_dims[static_cast<std::size_t>(m)];
    }
    json fusion = {
        {"num_qubits", config.num_qubits},
        {"depth", config.depth},
        {"modality_dims", dims},
        {"softmax_temperature", config.softmax_temperature},
        {"attention_trainable", config.attention_trainable},
    };
    json navq = {
        {"learning_rate", config.train.learning_rate},
        {"episodes_per_update", config.train.episodes_per_update},
        {"baseline", config.train.baseline == rl::Baseline::MeanReturn ? "mean_return" : "none"},
        {"discount", config.train.discount},
        {"updates", config.updates},
    };
    json targets = json::array();
    for (int m = 0; m < kModalityCount; ++m) {
        if (config.attack.target_modalities[static_cast<std::size_t>(m)]) {
            targets.push_back(modality_name(static_cast<Modality>(m)));
        }
    }
    json adversarial = {
        {"lambda", config.lambda},
        {"epsilon", config.attack.epsilon},
        {"steps", config.attack.steps},
        {"step_size", config.attack.step_size},
        {"target_modalities", targets},
        {"eval_epsilons", config.eval_epsilons},
        {"eval_episodes", config.eval_episodes},
    };
    json securebus = {
        {"suite_id", config.suite_id},
        {"registry_path", config.registry_path},
        {"per_frame_signature", config.per_frame_signature},
    };
    const json root = {
        {"environment", environment},
        {"fusion", fusion},
        {"navq", navq},
        {"adversarial", adversarial},
        {"securebus", securebus},
        {"rng_seed", config.rng_seed},
        {"output_dir", config.output_dir},
    };
    return root.dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string text = config_to_json(config);
    const auto digest =
        hashing::digest32(std::span<const std::uint8_t>(
            reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
    return hashing::hex_encode(digest);
}

}  // namespace qnav::cfg
