#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnav::hashing {

// Non-cryptographic mixing hashes shared by the deterministic crypto test
// backend and the run manifests. Quality target is avalanche on single-bit
// flips, not adversarial resistance.

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return x;
}

inline std::uint64_t hash64(std::span<const std::uint8_t> data, std::uint64_t salt = 0) {
    std::uint64_t h = mix64(salt ^ 0xcbf29ce484222325ULL);
    std::size_t i = 0;
    while (i + 8 <= data.size()) {
        std::uint64_t w = 0;
        for (int b = 0; b < 8; ++b) w |= static_cast<std::uint64_t>(data[i + b]) << (8 * b);
        h = mix64(h ^ w) * 0x100000001b3ULL;
        i += 8;
    }
    std::uint64_t tail = 0;
    int shift = 0;
    for (; i < data.size(); ++i, shift += 8) tail |= static_cast<std::uint64_t>(data[i]) << shift;
    h = mix64(h ^ tail ^ (static_cast<std::uint64_t>(data.size()) << 56));
    return mix64(h);
}

using Digest32 = std::array<std::uint8_t, 32>;

// 256-bit digest from four salted 64-bit lanes, cross-mixed so every lane
// depends on every input bit.
inline Digest32 digest32(std::span<const std::uint8_t> data) {
    std::uint64_t lanes[4];
    for (int l = 0; l < 4; ++l) lanes[l] = hash64(data, 0x9e3779b97f4a7c15ULL * (l + 1));
    std::uint64_t cross = mix64(lanes[0] ^ lanes[1] ^ lanes[2] ^ lanes[3]);
    Digest32 out{};
    for (int l = 0; l < 4; ++l) {
        std::uint64_t w = mix64(lanes[l] + cross * (l + 1));
        for (int b = 0; b < 8; ++b) out[l * 8 + b] = static_cast<std::uint8_t>(w >> (8 * b));
    }
    return out;
}

inline Digest32 keyed_digest32(std::span<const std::uint8_t> key,
                               std::span<const std::uint8_t> data) {
    std::vector<std::uint8_t> buf;
    buf.reserve(key.size() + data.size() + 8);
    buf.insert(buf.end(), key.begin(), key.end());
    std::uint64_t klen = key.size();
    for (int b = 0; b < 8; ++b) buf.push_back(static_cast<std::uint8_t>(klen >> (8 * b)));
    buf.insert(buf.end(), data.begin(), data.end());
    return digest32(buf);
}

inline std::string hex_encode(std::span<const std::uint8_t> data) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

inline std::vector<std::uint8_t> hex_decode(const std::string& s) {
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (s.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
    std::vector<std::uint8_t> out(s.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = nib(s[2 * i]), lo = nib(s[2 * i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

}  // namespace qnav::hashing
