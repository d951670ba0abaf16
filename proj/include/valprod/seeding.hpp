#pragma once

#include <cstdint>

namespace valprod
{
//! SplitMix64 finalizer; derives independent stream seeds from one seed.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

//! Seed of substream `index` of `seed`.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index)
{
    return splitmix64(seed ^ splitmix64(index + 1));
}

}  // namespace valprod
