#pragma once

#include <cstdint>
#include <random>

namespace stqos {

using Rng = std::mt19937_64;

// Named sub-streams derived from one scenario seed.
enum class Stream : std::uint64_t {
  topology = 1,
  arrivals = 2,
  channel = 3,
  decode = 4,
  interference = 5,
  replication = 6,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Deterministic, well-mixed child seed for (stream, index) under `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0) noexcept;

inline std::uint64_t derive_seed(std::uint64_t base, Stream stream, std::uint64_t index = 0) noexcept {
  return derive_seed(base, static_cast<std::uint64_t>(stream), index);
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace stqos
