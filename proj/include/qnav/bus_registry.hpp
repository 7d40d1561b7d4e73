#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "qnav/bus_frame.hpp"

namespace qnav::bus {

// What the processor knows about a sensor before any handshake: the keys it
// was provisioned with and the suite it speaks.
struct SensorRecord {
    std::uint8_t suite_id = 0;
    Bytes verification_key;
    Bytes kem_public_key;
};

// Read-only after startup; shared across all processor sessions.
class SensorRegistry {
public:
    void add(std::uint16_t sensor_id, SensorRecord record);
    const SensorRecord* find(std::uint16_t sensor_id) const;
    std::size_t size() const { return sensors_.size(); }

    // JSON object keyed by decimal sensor_id with hex-encoded key material.
    static SensorRegistry from_json(const std::string& text);
    std::string to_json() const;

    static SensorRegistry load_file(const std::string& path);
    void save_file(const std::string& path) const;

private:
    std::map<std::uint16_t, SensorRecord> sensors_;
};

}  // namespace qnav::bus
