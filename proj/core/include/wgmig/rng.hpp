#pragma once

#include <cstdint>
#include <random>

namespace wgmig {

/// splitmix64 mixing step; good avalanche, cheap, stable across platforms.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent 64-bit stream seed from (master seed, stream index).
/// Realizations keyed this way are reproducible regardless of which worker
/// thread executes them.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master ^ 0x9e3779b97f4a7c15ULL;
    splitmix64(s);
    s ^= index * 0xda942042e4dd58b5ULL + 0x2545f4914f6cdd1dULL;
    splitmix64(s);
    return splitmix64(s);
}

/// RNG engine for one realization stream.
inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t index) {
    return std::mt19937_64(stream_seed(master, index));
}

} // namespace wgmig
