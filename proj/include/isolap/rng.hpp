// Small deterministic RNG (SplitMix64). Sampling results must be
// byte-for-byte reproducible across platforms for a fixed seed, which rules
// out std::mt19937 + distribution wrappers (distributions are
// implementation-defined). The generator below is the reference SplitMix64
// mixer; uniform doubles take the top 53 bits.
#pragma once

#include <cstdint>

namespace isolap {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be positive; modulo bias is
    // irrelevant at the sample counts used here but we reject anyway.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t limit = ~0ull - ~0ull % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    // Independent child stream, used when sampling procedures fork.
    Rng split() { return Rng(next_u64()); }

private:
    std::uint64_t state_;
};

}  // namespace isolap
