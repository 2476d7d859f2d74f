#pragma once

// Reproducible randomness. std::mt19937_64 is fully specified by the
// standard, but the std:: distributions are not, so uniform, integer and
// normal draws are derived from raw engine output here. Reports generated
// with a given seed therefore match across compilers and releases.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace omprip {

/// SplitMix64 finaliser.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed for item `index` of a stream rooted at `master`:
///   mix_seed(master, index) = splitmix64(splitmix64(master) ^ (index * 0xD1B54A32D192ED03)).
/// This formula is part of the report format; changing it changes every
/// published result.
constexpr std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) noexcept
{
    return splitmix64(splitmix64(master) ^ (index * 0xD1B54A32D192ED03ULL));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n), unbiased by rejection.
    std::uint64_t below(std::uint64_t n)
    {
        const std::uint64_t limit = n == 0 ? 0 : (~std::uint64_t{0} - n + 1) % n; // 2^64 mod n
        for (;;) {
            const std::uint64_t x = engine_();
            if (x >= limit) {
                return x % n;
            }
        }
    }

    bool coin() { return (engine_() >> 63) != 0; }

    /// Standard normal via Box-Muller (both outputs used).
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform01();
        } while (u1 == 0.0);
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace omprip
