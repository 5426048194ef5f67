#pragma once

#include <cstdint>

namespace bincover {

// Default seed used by the CLI when none is given; documented in the README.
inline constexpr std::uint64_t kDefaultSeed = 0xB1C05EEDULL;

struct RandomSeed {
    std::uint64_t seed = kDefaultSeed;
    std::uint64_t stream = 0; // per-trial stream id; trial index by convention
};

namespace detail {
// SplitMix64 finalizer (Stafford variant 13); a 64-bit bijection.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}
} // namespace detail

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// Counter-based SplitMix64 with explicit streams.
//
// word i of stream (seed, stream) = mix64(base + (i+1)*GOLDEN)
// where base = seed + mix64(stream ^ GOLDEN).
//
// The whole sequence is a pure function of (seed, stream), so trials can be
// assigned stream = trial index and reproduced independently of scheduling.
class Rng {
  public:
    explicit Rng(RandomSeed s)
        : state_(s.seed + detail::mix64(s.stream ^ kGolden)) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        return detail::mix64(state_);
    }

    // Unbiased uniform draw in [0, bound) by rejection. bound >= 1.
    std::uint64_t below(std::uint64_t bound) {
        // Rejection threshold: values >= 2^64 - (2^64 mod bound) are discarded.
        std::uint64_t limit = -bound % bound; // == 2^64 mod bound
        std::uint64_t w = next_u64();
        while (w < limit) w = next_u64();
        return w % bound;
    }

  private:
    std::uint64_t state_;
};

} // namespace bincover
