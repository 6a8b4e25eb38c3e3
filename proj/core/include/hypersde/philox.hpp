#pragma once

#include <array>
#include <cstdint>

namespace hypersde {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A pure
/// function of (counter, key); no state is carried between calls.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept;
};

/// Uniform in the open interval (0, 1) from the high 52 bits of a 64-bit word.
double uniform_open(std::uint64_t bits) noexcept;

/// Standard normal by Box-Muller from one Philox block keyed by seed and
/// counter {c0, c1, c2, c3}.
double philox_normal(std::uint64_t seed, std::uint32_t c0, std::uint32_t c1, std::uint32_t c2,
                     std::uint32_t c3) noexcept;

}  // namespace hypersde
