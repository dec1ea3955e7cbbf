#pragma once

#include <cstdint>
#include <string_view>

namespace toolgate {

// FNV-1a 64-bit. Stable across platforms; used for index checksums and
// to seed per-token vectors in the deterministic embedder.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char byte : data) {
        hash ^= byte;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

// splitmix64 step. Integer-only, so the stream is bit-identical everywhere.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Top 53 bits mapped to [0, 1).
inline double u64_to_unit_double(std::uint64_t x) {
    return static_cast<double>(x >> 11) * (1.0 / 9007199254740992.0);
}

}  // namespace toolgate
