#pragma once

#include <array>
#include <cstdint>

#include "qnav/bus_frame.hpp"
#include "qnav/bus_registry.hpp"
#include "qnav/bus_suite.hpp"
#include "qnav/rng.hpp"

namespace qnav::bus {

enum class Role : int { Sensor = 0, Processor = 1 };
enum class ChannelState : int { Idle, HelloSent, Established, Failed };

// Each direction seals from its own half of the u64 counter space, so the two
// directions of one session can never collide on a (key, nonce) pair while
// consecutive seals still get consecutive sequence numbers.
constexpr std::uint64_t kSensorSeqFirst = 1;
constexpr std::uint64_t kSensorSeqLast = (1ull << 63) - 1;
constexpr std::uint64_t kProcessorSeqFirst = 1ull << 63;
constexpr std::uint64_t kProcessorSeqLast = ~0ull;

std::uint64_t role_seq_first(Role role);
std::uint64_t role_seq_last(Role role);

struct SessionState {
    Role role = Role::Sensor;
    ChannelState state = ChannelState::Idle;
    std::uint16_t sensor_id = 0;
    std::uint8_t suite_id = 0;
    std::array<std::uint8_t, 32> session_key{};
    std::uint64_t send_seq = 0;
    std::uint64_t recv_seq = 0;  // highest accepted incoming sequence

    // When set, each sensor Data payload carries a signature over the
    // plaintext inside the encryption (fidelity experiment; handshake-only
    // signing is the default).
    bool per_frame_signature = false;

    Bytes sig_secret_key;   // sensor role
    Bytes kem_secret_key;   // sensor role
    Bytes peer_verify_key;  // processor role, resolved from the registry

    std::array<std::uint8_t, 32> hello_nonce{};
    Bytes hello_transcript;  // serialized hello, held until the response lands

    rng::Engine rng{rng::Engine(0)};
};

SessionState make_sensor_session(std::uint16_t sensor_id, std::uint8_t suite_id,
                                 Bytes sig_secret_key, Bytes kem_secret_key,
                                 std::uint64_t rng_seed, bool per_frame_signature = false);
SessionState make_processor_session(std::uint64_t rng_seed, bool per_frame_signature = false);

// Generates long-term keys for one sensor, publishing the public halves into
// the registry and returning the secret halves.
struct SensorProvision {
    Bytes sig_secret_key;
    Bytes kem_secret_key;
};
SensorProvision provision_sensor(SensorRegistry& registry, const CryptoSuite& suite,
                                 std::uint16_t sensor_id, rng::Engine& eng);

// Four-step channel establishment:
//   1. sensor  --Hello-->        signed (sensor_id, suite, 32-byte nonce)
//   2. processor --KemResponse-> encapsulation to the sensor's public key
//   3. both derive session_key = H(shared_secret || hello nonce || transcript)
//   4. Data frames flow under AEAD with the header as associated data
SecureFrame handshake_hello(SessionState& sensor);
SecureFrame handshake_respond(SessionState& processor, const SecureFrame& hello,
                              const SensorRegistry& registry);
void handshake_complete(SessionState& sensor, const SecureFrame& response);

SecureFrame seal_frame(SessionState& session, const Bytes& plaintext);
Bytes open_frame(SessionState& session, const SecureFrame& frame);

// Re-runs the handshake on an established pair: fresh key, counters reset.
void rotate_keys(SessionState& sensor, SessionState& processor,
                 const SensorRegistry& registry);

// Unauthenticated end-of-stream marker for transports.
SecureFrame close_frame(const SessionState& session);

}  // namespace qnav::bus
