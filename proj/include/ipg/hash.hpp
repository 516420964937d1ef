#pragma once

// FNV-1a 64-bit: a tiny, stable content hash used to seed deterministic
// behaviors (mock completions, session manifests). Not cryptographic.

#include <cstdint>
#include <string>

namespace ipg {

inline uint64_t fnv1a64(const std::string& data) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= static_cast<uint64_t>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace ipg
