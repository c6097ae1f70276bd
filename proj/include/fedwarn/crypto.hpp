#pragma once

#include <mutex>
#include <string>

#include <sodium.h>

#include "fedwarn/bytes.hpp"
#include "fedwarn/errors.hpp"
#include "fedwarn/rng.hpp"

namespace fedwarn {

// Signature scheme identifier, bound into the genesis block hash so a chain
// records the primitives it was built with.
inline constexpr const char* kSignatureScheme = "ed25519+sha256";

inline void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) {
            throw Error("libsodium initialization failed");
        }
    });
}

inline Digest sha256(const Bytes& data) {
    ensure_sodium();
    Digest out;
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

inline Digest hmac_sha256(const Bytes& key, const Bytes& msg) {
    ensure_sodium();
    crypto_auth_hmacsha256_state st;
    crypto_auth_hmacsha256_init(&st, key.data(), key.size());
    crypto_auth_hmacsha256_update(&st, msg.data(), msg.size());
    Digest out;
    static_assert(crypto_auth_hmacsha256_BYTES == 32);
    crypto_auth_hmacsha256_final(&st, out.data());
    return out;
}

struct KeyPair {
    std::string peer_id;
    Bytes public_key; // 32 bytes
    Bytes secret_key; // 64 bytes
};

// Deterministic Ed25519 key pair from a 64-bit seed. The seed is expanded to
// the 32-byte scheme seed with splitmix64, so distinct seeds give distinct keys.
inline KeyPair generate_keypair(std::uint64_t seed) {
    ensure_sodium();
    std::uint8_t expanded[crypto_sign_SEEDBYTES];
    std::uint64_t state = seed;
    for (int i = 0; i < 4; ++i) {
        std::uint64_t word = splitmix64(state);
        for (int b = 0; b < 8; ++b) {
            expanded[i * 8 + b] = static_cast<std::uint8_t>(word >> (8 * b));
        }
    }
    KeyPair kp;
    kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
    kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), expanded);
    kp.peer_id = "peer-" + hex_encode(kp.public_key.data(), 8);
    return kp;
}

inline Bytes sign_message(const Bytes& msg, const KeyPair& signer) {
    ensure_sodium();
    Bytes sig(crypto_sign_BYTES);
    crypto_sign_detached(sig.data(), nullptr, msg.data(), msg.size(),
                         signer.secret_key.data());
    return sig;
}

inline bool verify_signature(const Bytes& sig, const Bytes& msg, const Bytes& public_key) {
    ensure_sodium();
    if (sig.size() != crypto_sign_BYTES || public_key.size() != crypto_sign_PUBLICKEYBYTES) {
        return false;
    }
    return crypto_sign_verify_detached(sig.data(), msg.data(), msg.size(),
                                       public_key.data()) == 0;
}

} // namespace fedwarn
