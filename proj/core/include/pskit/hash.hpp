#pragma once

#include <cstddef>
#include <cstdint>

namespace pskit {

/// 128-bit digest with a stable cross-platform value for a given byte
/// sequence (MurmurHash3 x64 variant).
struct Digest {
    uint64_t hi = 0, lo = 0;

    bool operator==(const Digest&) const = default;
    bool operator<(const Digest& o) const { return hi != o.hi ? hi < o.hi : lo < o.lo; }
};

Digest murmur3_x64_128(const void* data, size_t len, uint64_t seed = 0);

struct DigestHasher {
    size_t operator()(const Digest& d) const { return static_cast<size_t>(d.lo); }
};

/// splitmix64: tiny deterministic generator used for seed-stable choices.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace pskit
