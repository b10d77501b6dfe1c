#include <doctest.h>

#include <cmath>
#include <set>

#include "rigidity/random.hpp"

using namespace rigidity;

TEST_SUITE("random") {
  TEST_CASE("Philox4x32-10 known answers") {
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::block(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::block(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::block(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  }

  TEST_CASE("splitmix64 finalizer") {
    // First output of splitmix64 seeded with 0.
    CHECK(mix64(0) == 0xE220A8397B1DCDAFull);
  }

  TEST_CASE("draws are pure functions of (seed, stream, index)") {
    CHECK(standard_normal(5, Stream::SiteNoise, 17) == standard_normal(5, Stream::SiteNoise, 17));
    CHECK(standard_normal(5, Stream::SiteNoise, 17) != standard_normal(5, Stream::SharedNoise, 17));
    CHECK(standard_normal(5, Stream::SiteNoise, 17) != standard_normal(6, Stream::SiteNoise, 17));
    CHECK(random_bits(1, Stream::Deletion, 1ull << 40) != random_bits(1, Stream::Deletion, 0));
  }

  TEST_CASE("uniforms lie in (0, 1) with the right mean") {
    double sum = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      double u = uniform_open(42, Stream::Bootstrap, i);
      REQUIRE(u > 0.0);
      REQUIRE(u < 1.0);
      sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) < 5 * std::sqrt(1.0 / 12 / n));
  }

  TEST_CASE("normal moments") {
    const int n = 400000;
    double s1 = 0, s2 = 0, s4 = 0;
    int beyond2 = 0;
    for (int i = 0; i < n; ++i) {
      double z = standard_normal(9, Stream::SiteNoise, i);
      s1 += z;
      s2 += z * z;
      s4 += z * z * z * z;
      beyond2 += std::abs(z) > 2;
    }
    CHECK(std::abs(s1 / n) < 5 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1) < 5 * std::sqrt(2.0 / n));
    CHECK(std::abs(s4 / n - 3) < 5 * std::sqrt(96.0 / n));
    // P(|Z| > 2) = 0.0455003
    CHECK(std::abs(beyond2 / static_cast<double>(n) - 0.0455003) < 5 * std::sqrt(0.0455 * 0.9545 / n));
  }

  TEST_CASE("derived seeds are distinct") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t b = 0; b < 4; ++b) {
      for (std::uint64_t i = 0; i < 5000; ++i) seen.insert(derive_seed(b, i));
    }
    CHECK(seen.size() == 20000);
  }
}
