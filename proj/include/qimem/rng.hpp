#pragma once

#include <cstdint>
#include <random>

namespace qimem {

/// Seedable random source. All stochastic operations take one of these
/// explicitly; there is no hidden global generator. The uniform doubles are
/// produced from raw 64-bit draws so that a given seed yields the same
/// stream on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        // Rejection sampling to avoid modulo bias.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

  private:
    std::mt19937_64 engine_;
};

/// Derives an independent per-task seed from a base seed, so that work items
/// (optimizer restarts, retrieval subsets, parallel workers) can be given
/// their own streams without coupling their order of evaluation.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 over the combined value.
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace qimem
