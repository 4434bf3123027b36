#pragma once
// Hashing primitives: SHA-256 digests for cache keys (OpenSSL) and a seeded
// 64-bit FNV-1a for shingles and the hash embedder. FNV is used instead of
// std::hash because its output must be identical on every platform.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include <openssl/sha.h>

namespace embench {

using Digest256 = std::array<uint8_t, 32>;

inline Digest256 sha256(std::string_view data) {
    Digest256 out{};
    SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), out.data());
    return out;
}

inline std::string digest_hex(const Digest256& d) {
    static const char* hex = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (uint8_t b : d) {
        s.push_back(hex[b >> 4]);
        s.push_back(hex[b & 0xf]);
    }
    return s;
}

inline uint64_t fnv1a64(std::string_view data, uint64_t seed = 0xcbf29ce484222325ULL) {
    uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace embench
