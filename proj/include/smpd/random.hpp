#pragma once

// Seeded random number generation for the cycle simulator. The generator is
// mt19937_64 and every distribution is implemented here on top of its raw
// 64-bit output, so a given seed produces the same stream on every platform
// and standard library. Simulations are reproducible byte-for-byte.

#include <cmath>
#include <cstdint>
#include <random>

namespace smpd {

/// splitmix64 step; used to derive independent sub-stream seeds from a master
/// seed and a tag.
[[nodiscard]] inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0,1) with 53 random bits.
    [[nodiscard]] double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    [[nodiscard]] double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    [[nodiscard]] bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller (no state carried between calls).
    [[nodiscard]] double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    [[nodiscard]] double normal(double mean, double sigma) { return mean + sigma * normal(); }

    /// Exponential with the given rate (mean 1/rate).
    [[nodiscard]] double exponential(double rate) {
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return -std::log(u) / rate;
    }

    /// Poisson sample. Knuth's product method for small means (the simulator
    /// only sees per-window means well below 1); Gaussian approximation above.
    [[nodiscard]] unsigned poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 30.0) {
            const double limit = std::exp(-mean);
            unsigned k = 0;
            double product = uniform();
            while (product > limit) {
                ++k;
                product *= uniform();
            }
            return k;
        }
        const double x = std::round(mean + std::sqrt(mean) * normal());
        return x < 0.0 ? 0u : static_cast<unsigned>(x);
    }

    [[nodiscard]] std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace smpd
