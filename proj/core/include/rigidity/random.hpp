#pragma once

#include <array>
#include <cstdint>

namespace rigidity {

// Philox4x32-10 counter-based generator (Salmon et al. 2011). Stateless:
// output is a pure function of (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter block(Counter ctr, Key key);
};

// Streams used by the library. Each draw is addressed by
// (seed, stream, index) so results do not depend on evaluation order.
enum class Stream : std::uint32_t {
  SiteNoise = 1,
  SharedNoise = 2,
  Deletion = 3,
  Bootstrap = 4,
};

// Standard normal for draw `index` of `stream` under `seed` (Box-Muller on one
// Philox block).
double standard_normal(std::uint64_t seed, Stream stream, std::uint64_t index);

// Uniform on (0, 1) with 53 random bits.
double uniform_open(std::uint64_t seed, Stream stream, std::uint64_t index);

// 64 random bits.
std::uint64_t random_bits(std::uint64_t seed, Stream stream, std::uint64_t index);

// splitmix64 finalizer; used to derive per-trial / per-repetition seeds.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace rigidity
