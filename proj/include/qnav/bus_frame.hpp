#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qnav/bus_errors.hpp"

namespace qnav::bus {

using Bytes = std::vector<std::uint8_t>;

// Wire layout, all integers little-endian:
//
//   offset  size  field
//        0     2  magic 0x51 0x41
//        2     1  version (1)
//        3     1  msg_type
//        4     1  suite_id
//        5     2  sensor_id
//        7     8  sequence
//       15    12  nonce
//       27     4  payload_len
//       31     n  payload
//    31 + n    16  tag (Data frames only)
constexpr std::array<std::uint8_t, 2> kMagic = {0x51, 0x41};
constexpr std::uint8_t kWireVersion = 1;
constexpr std::size_t kHeaderSize = 31;
constexpr std::size_t kTagSize = 16;
constexpr std::size_t kNonceSize = 12;
constexpr std::uint32_t kMaxPayload = 1u << 20;

enum class MsgType : std::uint8_t { Hello = 0, KemResponse = 1, Data = 2, Close = 3 };

struct SecureFrame {
    std::uint8_t version = kWireVersion;
    MsgType msg_type = MsgType::Hello;
    std::uint8_t suite_id = 0;
    std::uint16_t sensor_id = 0;
    std::uint64_t sequence = 0;
    std::array<std::uint8_t, kNonceSize> nonce{};
    Bytes payload;
    std::array<std::uint8_t, kTagSize> tag{};  // meaningful for Data only

    bool has_tag() const { return msg_type == MsgType::Data; }
};

// nonce = LE32(sensor_id) || LE64(sequence): the 2-byte id zero-padded to 4
// bytes, then the counter.
std::array<std::uint8_t, kNonceSize> make_nonce(std::uint16_t sensor_id, std::uint64_t sequence);

// The 31 header bytes; used on its own as the AEAD associated data.
std::array<std::uint8_t, kHeaderSize> header_bytes(const SecureFrame& frame);

Bytes serialize_frame(const SecureFrame& frame);

// Total on arbitrary input: returns a frame or throws MalformedFrame naming
// the first violated field. Never reads out of bounds.
SecureFrame parse_frame(const Bytes& data);
SecureFrame parse_frame(const std::uint8_t* data, std::size_t size);

}  // namespace qnav::bus
