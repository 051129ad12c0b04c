#pragma once

// Pipeline RNG: std::mt19937_64 (standardized output sequence) with an
// explicit rejection-sampled bounded draw, so cohort sampling and phantom
// generation are bit-stable across platforms and standard libraries.
// Per-case streams derive their seed with splitmix64 over (seed, index).

#include <cstdint>
#include <random>

namespace panceval {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Derived stream for (seed, index) pairs; independent of draw order
    // across cases.
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(splitmix64(seed ^ splitmix64(index + 1)));
    }

    std::uint64_t next() { return engine_(); }

    // Uniform draw in [0, n) by rejection; unbiased and portable.
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace panceval
