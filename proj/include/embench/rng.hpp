#pragma once
// Small deterministic RNG (splitmix64). Used wherever results must be
// reproducible bit-for-bit across platforms and standard libraries, which
// rules out std::uniform_*_distribution.

#include <cstdint>

namespace embench {

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform integer in [0, bound). Rejection sampling, no modulo bias.
    uint64_t bounded(uint64_t bound) {
        if (bound <= 1) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t r = next();
        while (r >= limit) r = next();
        return r % bound;
    }

    // Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    uint64_t state_;
};

// Stateless mixer for deriving independent stream seeds from (seed, lane).
inline uint64_t mix_seed(uint64_t seed, uint64_t lane) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (lane + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace embench
