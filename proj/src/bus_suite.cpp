#include "qnav/bus_suite.hpp"

#include <cstring>

#include "qnav/hashing.hpp"

#ifdef QNAV_WITH_OPENSSL
#include <openssl/evp.h>
#endif

namespace qnav::bus {

namespace {

using hashing::Digest32;

Bytes random_bytes(rng::Engine& eng, std::size_t n) {
    Bytes out(n);
    rng::fill_bytes(eng, out.data(), out.size());
    return out;
}

Bytes cat(std::initializer_list<std::span<const std::uint8_t>> parts) {
    Bytes out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

std::span<const std::uint8_t> lit(const char* s) {
    return {reinterpret_cast<const std::uint8_t*>(s), std::strlen(s)};
}

// Constant-time-style comparison; the test backend is not side-channel
// hardened, but the habit costs nothing.
bool equal_ct(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size()) return false;
    std::uint8_t acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc |= a[i] ^ b[i];
    return acc == 0;
}

// --- deterministic test backend -------------------------------------------
//
// Signatures: sk is 32 random bytes, vk == sk, signature = keyed digest of
// the message. Unforgeable without the key under the keyed-hash model, which
// is exactly the property the protocol tests need.
class TestSigner final : public Signer {
public:
    KeyPair keygen(rng::Engine& eng) const override {
        KeyPair kp;
        kp.secret_key = random_bytes(eng, 32);
        kp.public_key = kp.secret_key;
        return kp;
    }

    Bytes sign(const Bytes& secret_key, const Bytes& message) const override {
        const Digest32 d = hashing::keyed_digest32(secret_key, message);
        return Bytes(d.begin(), d.end());
    }

    bool verify(const Bytes& verify_key, const Bytes& message,
                const Bytes& signature) const override {
        const Digest32 d = hashing::keyed_digest32(verify_key, message);
        return equal_ct(signature, d);
    }

    std::size_t signature_size() const override { return 32; }
};

// KEM: pk = H(sk || "kem-pk"); the ciphertext is an ephemeral value and the
// shared secret is H(pk || eph || "kem-ss"), computable by the holder of pk
// (encapsulator) and the holder of sk (derives pk, reads the ciphertext).
class TestKem final : public Kem {
public:
    KeyPair keygen(rng::Engine& eng) const override {
        KeyPair kp;
        kp.secret_key = random_bytes(eng, 32);
        kp.public_key = derive_pk(kp.secret_key);
        return kp;
    }

    Encapsulation encapsulate(const Bytes& public_key, rng::Engine& eng) const override {
        Encapsulation enc;
        enc.ciphertext = random_bytes(eng, 32);
        enc.shared_secret = secret_from(public_key, enc.ciphertext);
        return enc;
    }

    std::array<std::uint8_t, 32> decapsulate(const Bytes& secret_key,
                                             const Bytes& ciphertext) const override {
        return secret_from(derive_pk(secret_key), ciphertext);
    }

private:
    static Bytes derive_pk(const Bytes& sk) {
        const Digest32 d = hashing::digest32(cat({sk, lit("kem-pk")}));
        return Bytes(d.begin(), d.end());
    }

    static std::array<std::uint8_t, 32> secret_from(const Bytes& pk, const Bytes& ct) {
        return hashing::digest32(cat({pk, ct, lit("kem-ss")}));
    }
};

// AEAD: xor keystream from a counter hash, 16-byte tag from two salted hashes
// over (key, nonce, aad, ciphertext). Any single-bit change to ciphertext,
// tag, or aad flips the comparison.
class TestAead final : public Aead {
public:
    Bytes seal(const std::array<std::uint8_t, 32>& key,
               const std::array<std::uint8_t, kNonceSize>& nonce, const Bytes& aad,
               const Bytes& plaintext) const override {
        Bytes out = plaintext;
        apply_keystream(key, nonce, out);
        const auto tag = compute_tag(key, nonce, aad, out);
        out.insert(out.end(), tag.begin(), tag.end());
        return out;
    }

    std::optional<Bytes> open(const std::array<std::uint8_t, 32>& key,
                              const std::array<std::uint8_t, kNonceSize>& nonce, const Bytes& aad,
                              const Bytes& sealed) const override {
        if (sealed.size() < kTagSize) return std::nullopt;
        Bytes ciphertext(sealed.begin(), sealed.end() - kTagSize);
        const auto want = compute_tag(key, nonce, aad, ciphertext);
        if (!equal_ct({sealed.data() + ciphertext.size(), kTagSize}, want)) {
            return std::nullopt;
        }
        apply_keystream(key, nonce, ciphertext);  // xor is its own inverse
        return ciphertext;
    }

private:
    static void apply_keystream(const std::array<std::uint8_t, 32>& key,
                                const std::array<std::uint8_t, kNonceSize>& nonce, Bytes& data) {
        const Bytes prefix = cat({key, nonce});
        for (std::size_t block = 0; block * 8 < data.size(); ++block) {
            Bytes input = prefix;
            for (int b = 0; b < 8; ++b) {
                input.push_back(static_cast<std::uint8_t>(block >> (8 * b)));
            }
            const std::uint64_t word = hashing::hash64(input, 0x6b65797374726d31ULL);
            for (std::size_t i = block * 8; i < std::min(data.size(), block * 8 + 8); ++i) {
                data[i] ^= static_cast<std::uint8_t>(word >> (8 * (i - block * 8)));
            }
        }
    }

    static std::array<std::uint8_t, kTagSize> compute_tag(
        const std::array<std::uint8_t, 32>& key,
        const std::array<std::uint8_t, kNonceSize>& nonce, const Bytes& aad,
        const Bytes& ciphertext) {
        // Length-prefix the aad so (aad, ct) boundaries cannot be shifted.
        Bytes input = cat({key, nonce});
        const std::uint64_t alen = aad.size();
        for (int b = 0; b < 8; ++b) input.push_back(static_cast<std::uint8_t>(alen >> (8 * b)));
        input.insert(input.end(), aad.begin(), aad.end());
        input.insert(input.end(), ciphertext.begin(), ciphertext.end());

        std::array<std::uint8_t, kTagSize> tag{};
        const std::uint64_t lo = hashing::hash64(input, 0x7461672d6c6f7730ULL);
        const std::uint64_t hi = hashing::hash64(input, 0x7461672d68697731ULL);
        for (int b = 0; b < 8; ++b) {
            tag[b] = static_cast<std::uint8_t>(lo >> (8 * b));
            tag[8 + b] = static_cast<std::uint8_t>(hi >> (8 * b));
        }
        return tag;
    }
};

#ifdef QNAV_WITH_OPENSSL
class AesGcmAead final : public Aead {
public:
    Bytes seal(const std::array<std::uint8_t, 32>& key,
               const std::array<std::uint8_t, kNonceSize>& nonce, const Bytes& aad,
               const Bytes& plaintext) const override {
        EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
        Bytes out(plaintext.size() + kTagSize);
        int len = 0;
        bool ok = ctx != nullptr &&
                  EVP_EncryptInit_ex(ctx, EVP_aes_256_gcm(), nullptr, key.data(),
                                     nonce.data()) == 1 &&
                  (aad.empty() ||
                   EVP_EncryptUpdate(ctx, nullptr, &len, aad.data(),
                                     static_cast<int>(aad.size())) == 1) &&
                  (plaintext.empty() ||
                   EVP_EncryptUpdate(ctx, out.data(), &len, plaintext.data(),
                                     static_cast<int>(plaintext.size())) == 1) &&
                  EVP_EncryptFinal_ex(ctx, out.data() + plaintext.size(), &len) == 1 &&
                  EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_GET_TAG, kTagSize,
                                      out.data() + plaintext.size()) == 1;
        EVP_CIPHER_CTX_free(ctx);
        if (!ok) throw BusError("AES-GCM seal failed");
        return out;
    }

    std::optional<Bytes> open(const std::array<std::uint8_t, 32>& key,
                              const std::array<std::uint8_t, kNonceSize>& nonce, const Bytes& aad,
                              const Bytes& sealed) const override {
        if (sealed.size() < kTagSize) return std::nullopt;
        const std::size_t ct_len = sealed.size() - kTagSize;
        EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
        Bytes out(ct_len);
        int len = 0;
        Bytes tag(sealed.end() - kTagSize, sealed.end());
        bool ok = ctx != nullptr &&
                  EVP_DecryptInit_ex(ctx, EVP_aes_256_gcm(), nullptr, key.data(),
                                     nonce.data()) == 1 &&
                  (aad.empty() ||
                   EVP_DecryptUpdate(ctx, nullptr, &len, aad.data(),
                                     static_cast<int>(aad.size())) == 1) &&
                  (ct_len == 0 ||
                   EVP_DecryptUpdate(ctx, out.data(), &len, sealed.data(),
                                     static_cast<int>(ct_len)) == 1) &&
                  EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_SET_TAG, kTagSize, tag.data()) == 1 &&
                  EVP_DecryptFinal_ex(ctx, out.data() + ct_len, &len) == 1;
        EVP_CIPHER_CTX_free(ctx);
        if (!ok) return std::nullopt;
        return out;
    }
};
#endif

const TestKem kTestKem;
const TestSigner kTestSigner;
const TestAead kTestAead;
#ifdef QNAV_WITH_OPENSSL
const AesGcmAead kAesGcmAead;
#endif

}  // namespace

const CryptoSuite& test_suite() {
    static const CryptoSuite suite{&kTestKem, &kTestSigner, &kTestAead, 1, 0,
                                   "test-keyed-hash"};
    return suite;
}

#ifdef QNAV_WITH_OPENSSL
const CryptoSuite& aes_gcm_suite() {
    static const CryptoSuite suite{&kTestKem, &kTestSigner, &kAesGcmAead, 2, 0,
                                   "test-kem-aes256gcm"};
    return suite;
}
#endif

const CryptoSuite* find_suite(std::uint8_t suite_id) {
    if (suite_id == test_suite().suite_id) return &test_suite();
#ifdef QNAV_WITH_OPENSSL
    if (suite_id == aes_gcm_suite().suite_id) return &aes_gcm_suite();
#endif
    return nullptr;
}

}  // namespace qnav::bus
