#include "qnav/bus_frame.hpp"

#include <cstring>

namespace qnav::bus {

namespace {

void put_u16(Bytes& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(Bytes& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint16_t get_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

}  // namespace

std::array<std::uint8_t, kNonceSize> make_nonce(std::uint16_t sensor_id, std::uint64_t sequence) {
    std::array<std::uint8_t, kNonceSize> nonce{};
    nonce[0] = static_cast<std::uint8_t>(sensor_id & 0xff);
    nonce[1] = static_cast<std::uint8_t>(sensor_id >> 8);
    // bytes 2..3 stay zero padding
    for (int i = 0; i < 8; ++i) {
        nonce[4 + i] = static_cast<std::uint8_t>(sequence >> (8 * i));
    }
    return nonce;
}

std::array<std::uint8_t, kHeaderSize> header_bytes(const SecureFrame& frame) {
    Bytes out;
    out.reserve(kHeaderSize);
    out.push_back(kMagic[0]);
    out.push_back(kMagic[1]);
    out.push_back(frame.version);
    out.push_back(static_cast<std::uint8_t>(frame.msg_type));
    out.push_back(frame.suite_id);
    put_u16(out, frame.sensor_id);
    put_u64(out, frame.sequence);
    out.insert(out.end(), frame.nonce.begin(), frame.nonce.end());
    put_u32(out, static_cast<std::uint32_t>(frame.payload.size()));

    std::array<std::uint8_t, kHeaderSize> header{};
    std::memcpy(header.data(), out.data(), kHeaderSize);
    return header;
}

Bytes serialize_frame(const SecureFrame& frame) {
    const auto header = header_bytes(frame);
    Bytes out(header.begin(), header.end());
    out.insert(out.end(), frame.payload.begin(), frame.payload.end());
    if (frame.has_tag()) out.insert(out.end(), frame.tag.begin(), frame.tag.end());
    return out;
}

SecureFrame parse_frame(const Bytes& data) { return parse_frame(data.data(), data.size()); }

SecureFrame parse_frame(const std::uint8_t* data, std::size_t size) {
    if (size < kHeaderSize) throw MalformedFrame("truncated: header needs 31 bytes");
    if (data[0] != kMagic[0] || data[1] != kMagic[1]) throw MalformedFrame("bad magic");
    SecureFrame frame;
    frame.version = data[2];
    if (frame.version != kWireVersion) throw MalformedFrame("unsupported version");
    if (data[3] > 3) throw MalformedFrame("unknown msg_type");
    frame.msg_type = static_cast<MsgType>(data[3]);
    frame.suite_id = data[4];
    frame.sensor_id = get_u16(data + 5);
    frame.sequence = get_u64(data + 7);
    std::memcpy(frame.nonce.data(), data + 15, kNonceSize);
    const std::uint32_t payload_len = get_u32(data + 27);
    if (payload_len > kMaxPayload) throw MalformedFrame("payload_len exceeds the frame cap");

    const std::size_t want =
        kHeaderSize + payload_len + (frame.has_tag() ? kTagSize : 0);
    if (size < want) throw MalformedFrame("truncated: body shorter than payload_len");
    if (size > want) throw MalformedFrame("trailing bytes after frame end");

    frame.payload.assign(data + kHeaderSize, data + kHeaderSize + payload_len);
    if (frame.has_tag()) {
        std::memcpy(frame.tag.data(), data + kHeaderSize + payload_len, kTagSize);
    }
    return frame;
}

}  // namespace qnav::bus
