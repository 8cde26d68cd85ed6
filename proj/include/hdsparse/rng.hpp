#pragma once
#include <cstdint>
#include <random>

namespace hdsparse {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; maps (master, counter) to well-mixed stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the `counter`-th independent stream derived from `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter)
{
    return splitmix64(splitmix64(master) ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
}

} // namespace hdsparse
