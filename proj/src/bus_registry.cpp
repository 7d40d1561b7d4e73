#include "qnav/bus_registry.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qnav/hashing.hpp"

namespace qnav::bus {

void SensorRegistry::add(std::uint16_t sensor_id, SensorRecord record) {
    sensors_[sensor_id] = std::move(record);
}

const SensorRecord* SensorRegistry::find(std::uint16_t sensor_id) const {
    const auto it = sensors_.find(sensor_id);
    return it == sensors_.end() ? nullptr : &it->second;
}

SensorRegistry SensorRegistry::from_json(const std::string& text) {
    SensorRegistry reg;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("registry: not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("sensors") || !doc["sensors"].is_object()) {
        throw std::invalid_argument("registry: expected an object with a \"sensors\" map");
    }
    for (const auto& [key, value] : doc["sensors"].items()) {
        unsigned long id = 0;
        try {
            std::size_t used = 0;
            id = std::stoul(key, &used);
            if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            throw std::invalid_argument("registry: sensor id \"" + key +
                                        "\" is not a decimal integer");
        }
        if (id > 0xffff) {
            throw std::invalid_argument("registry: sensor id " + key + " exceeds 16 bits");
        }
        SensorRecord record;
        try {
            record.suite_id = static_cast<std::uint8_t>(value.at("suite_id").get<int>());
            record.verification_key =
                hashing::hex_decode(value.at("verification_key").get<std::string>());
            record.kem_public_key =
                hashing::hex_decode(value.at("kem_public_key").get<std::string>());
        } catch (const std::exception& e) {
            throw std::invalid_argument("registry: sensor " + key + ": " + e.what());
        }
        reg.add(static_cast<std::uint16_t>(id), std::move(record));
    }
    return reg;
}

std::string SensorRegistry::to_json() const {
    nlohmann::json sensors = nlohmann::json::object();
    for (const auto& [id, record] : sensors_) {
        sensors[std::to_string(id)] = {
            {"suite_id", record.suite_id},
            {"verification_key", hashing::hex_encode(record.verification_key)},
            {"kem_public_key", hashing::hex_encode(record.kem_public_key)},
        };
    }
    return nlohmann::json{{"sensors", sensors}}.dump(2) + "\n";
}

SensorRegistry SensorRegistry::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("registry: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

void SensorRegistry::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("registry: cannot write " + path);
    out << to_json();
}

}  // namespace qnav::bus
