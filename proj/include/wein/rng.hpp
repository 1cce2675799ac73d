#pragma once

#include <cmath>
#include <cstdint>

namespace wein {

// SplitMix64 (Steele/Lea/Flood). Every random decision in this project comes
// from one of these streams so that corpora, initial weights and training
// runs replay bit-identically from their seeds.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 mantissa bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi], both inclusive.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(next() % static_cast<uint64_t>(hi - lo + 1));
    }

    /// Standard normal via Box-Muller. Consumes exactly two draws.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    uint64_t state_;
};

/// Derives an independent stream seed from (seed, index) by scrambling both
/// through the SplitMix64 output function.
inline uint64_t derive_seed(uint64_t seed, uint64_t index) {
    SplitMix64 g(seed ^ (0xA0761D6478BD642Full * (index + 1)));
    return g.next();
}

}  // namespace wein
