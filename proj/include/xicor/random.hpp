#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

// Self-contained pseudorandom machinery. The standard <random> engines are
// portable but the distributions are not; everything here is pinned to a
// fixed algorithm so that any (data, seed) pair reproduces bit-identically
// on every platform.

namespace xicor {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// splitmix64 finalizer (Steele/Lea/Vigna).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed of sub-stream `stream` under a master seed. Golden-ratio stepping
/// followed by mix64, so distinct streams are decorrelated.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(seed + kGoldenGamma * (stream + 1));
}

/// xoshiro256** (Blackman/Vigna), state filled by splitmix64 from the seed.
/// All deviate transformations live here so streams are fully specified.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            sm += kGoldenGamma;
            word = mix64(sm);
        }
    }

    std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0,1), 53 bits.
    double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

    /// Unbiased integer in [0, bound), bound >= 1, by rejection.
    std::uint64_t uniform_below(std::uint64_t bound) noexcept {
        const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    /// N(0,1) by Box-Muller; consumes exactly two uniforms per call.
    double normal() noexcept {
        const double u = 1.0 - uniform01();  // (0,1]
        const double v = uniform01();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * kPi * v);
    }

    bool bernoulli(double p) noexcept { return uniform01() < p; }

    int binomial(int trials, double p) noexcept {
        int k = 0;
        for (int i = 0; i < trials; ++i) k += bernoulli(p) ? 1 : 0;
        return k;
    }

    /// Fisher-Yates, high index downward.
    template <typename T>
    void shuffle(std::vector<T>& v) noexcept {
        for (std::size_t i = v.size(); i > 1; --i) {
            using std::swap;
            swap(v[i - 1], v[static_cast<std::size_t>(uniform_below(i))]);
        }
    }

private:
    static constexpr double kPi = 3.141592653589793238462643383279502884;

    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

}  // namespace xicor
