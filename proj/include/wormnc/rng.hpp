#pragma once

#include <cstdint>

namespace wormnc {

/// Deterministic 64-bit generator (splitmix64). Self-contained so that seeded
/// fixtures and regression values do not depend on standard-library
/// distribution internals.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n) {
        // rejection sampling on the top bits keeps the draw unbiased
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        if (hi <= lo) return lo;
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
        Rng r(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
        return r.next();
    }

  private:
    std::uint64_t state_;
};

}  // namespace wormnc
