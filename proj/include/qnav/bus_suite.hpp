#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qnav/bus_frame.hpp"
#include "qnav/rng.hpp"

namespace qnav::bus {

struct KeyPair {
    Bytes public_key;
    Bytes secret_key;
};

// Key encapsulation: both sides end up with the same 32-byte shared secret.
class Kem {
public:
    virtual ~Kem() = default;
    virtual KeyPair keygen(rng::Engine& eng) const = 0;
    struct Encapsulation {
        Bytes ciphertext;
        std::array<std::uint8_t, 32> shared_secret;
    };
    virtual Encapsulation encapsulate(const Bytes& public_key, rng::Engine& eng) const = 0;
    virtual std::array<std::uint8_t, 32> decapsulate(const Bytes& secret_key,
                                                     const Bytes& ciphertext) const = 0;
};

// Detached signatures with a fixed size per suite.
class Signer {
public:
    virtual ~Signer() = default;
    virtual KeyPair keygen(rng::Engine& eng) const = 0;
    virtual Bytes sign(const Bytes& secret_key, const Bytes& message) const = 0;
    virtual bool verify(const Bytes& verify_key, const Bytes& message,
                        const Bytes& signature) const = 0;
    virtual std::size_t signature_size() const = 0;
};

// Authenticated encryption; seal returns ciphertext || 16-byte tag.
class Aead {
public:
    virtual ~Aead() = default;
    virtual Bytes seal(const std::array<std::uint8_t, 32>& key,
                       const std::array<std::uint8_t, kNonceSize>& nonce, const Bytes& aad,
                       const Bytes& plaintext) const = 0;
    virtual std::optional<Bytes> open(const std::array<std::uint8_t, 32>& key,
                                      const std::array<std::uint8_t, kNonceSize>& nonce,
                                      const Bytes& aad, const Bytes& sealed) const = 0;
};

struct CryptoSuite {
    const Kem* kem = nullptr;
    const Signer* sig = nullptr;
    const Aead* aead = nullptr;
    std::uint8_t suite_id = 0;
    int nist_level = 0;  // metadata only; 0 for non-cryptographic backends
    std::string name;
};

// Deterministic non-cryptographic backend (suite 1): keyed hashing stands in
// for sign/KEM/AEAD so protocol logic is testable with zero dependencies and
// stable golden vectors. Not secure against a real adversary.
const CryptoSuite& test_suite();

#ifdef QNAV_WITH_OPENSSL
// Suite 2: same deterministic KEM/signatures, AES-256-GCM for the record
// layer.
const CryptoSuite& aes_gcm_suite();
#endif

// Lookup across the compiled-in suites; nullptr when unknown.
const CryptoSuite* find_suite(std::uint8_t suite_id);

}  // namespace qnav::bus
