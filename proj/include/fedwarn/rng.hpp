#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace fedwarn {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x00000100000001b3ULL;
    }
    return h;
}

// Stream split function: (master seed, purpose label) -> independent stream seed.
// Streams are keyed by label, so adding a new purpose never perturbs existing ones.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::string_view label) {
    std::uint64_t state = master ^ fnv1a64(label);
    splitmix64(state);
    return splitmix64(state);
}

// Deterministic random stream. All transforms are hand-rolled on top of
// mt19937_64 so draws are bit-identical across standard libraries; the
// std::*_distribution adapters are unspecified and must not be used here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    Rng(std::uint64_t master, std::string_view label)
        : gen_(derive_stream_seed(master, label)) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + uniform01() * (hi - lo);
    }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) {
        return uniform01() < p;
    }

    double exponential(double mean) {
        double u = uniform01();
        return -mean * std::log1p(-u);
    }

    // Inverse-CDF Laplace with location 0.
    double laplace(double scale) {
        double u = uniform01() - 0.5;
        double mag = -std::log1p(-2.0 * std::abs(u));
        return u < 0 ? -scale * mag : scale * mag;
    }

    // Box-Muller, one normal per call (two uniforms consumed, none cached,
    // so the draw count per call is fixed).
    double normal(double mean, double sd) {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) {
            u1 = uniform01();
        }
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sd * r * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::mt19937_64 gen_;
};

} // namespace fedwarn
