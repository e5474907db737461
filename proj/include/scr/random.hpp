#pragma once

#include <boost/random/mersenne_twister.hpp>

#include <cstdint>

namespace scr {

/// Boost's engine and distributions are header-only and platform
/// independent, so seeded streams reproduce bit-for-bit everywhere.
using Engine = boost::random::mt19937_64;

/// Counter-based seed derivation: mixes (base, stream, index) through
/// SplitMix64 so every matrix / replicate gets an independent stream that
/// does not depend on generation order.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ stream) ^ index);
}

namespace stream {
inline constexpr std::uint64_t similarity = 1;
inline constexpr std::uint64_t noise = 2;
inline constexpr std::uint64_t covariates = 3;
}  // namespace stream

}  // namespace scr
