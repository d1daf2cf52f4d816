#pragma once

#include <cstdint>
#include <random>

namespace stpanel {

/// Counter-based seed derivation. Every stochastic routine in the library
/// draws from an engine seeded by derive_seed(master, tags...), so results
/// are identical no matter how the work is scheduled across threads.
///
/// Mixing function is splitmix64 applied to the running state for each tag.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master) {
    return splitmix64(master);
}

template <typename... Tags>
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, Tags... rest) {
    return derive_seed(splitmix64(master ^ splitmix64(tag)), rest...);
}

/// Engine type used throughout. A substream is just an engine seeded with a
/// derived seed; substreams never share state.
using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) {
    return Engine(seed);
}

} // namespace stpanel
