#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace nca {

// splitmix64 finalizer; used both for seed expansion and for deriving
// independent sub-stream seeds (seed_i = mix_seed(base, i)) so that adding
// conditions or trials never perturbs existing ones.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a) {
    return mix64(base ^ mix64(a));
}

constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(base, a), b);
}

constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                                 std::uint64_t c) {
    return mix_seed(mix_seed(base, a, b), c);
}

// Deterministic RNG: mt19937_64 engine with hand-rolled distributions.
// std:: distributions are implementation-defined, so sampling is done
// explicitly to keep outputs bit-stable for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit mantissa.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n); n > 0. Rejection sampling, unbiased.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    // Inclusive integer range.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(uniform_int(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    // Standard normal via Box-Muller; two fresh uniforms per call.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    bool bernoulli(double p) { return p >= 1.0 || uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace nca
