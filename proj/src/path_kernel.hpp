#pragma once

#include "wdro/simulation.hpp"

#include <cstdint>

namespace wdro::detail {

inline constexpr std::size_t kMaxPolicies = 8;
inline constexpr std::size_t kLanes = 8;

struct KernelSetup {
    double log_x0 = 0.0;
    double drift = 0.0;  // -sigma^2 dt / 2
    double vol = 0.0;    // sigma sqrt(dt)
    double dt = 0.0;
    std::size_t steps = 0;
    const double* h = nullptr;     // h(t_n), n < steps
    const double* mirror = nullptr;  // x0^2 exp(-sigma^2 t_n), n <= steps
    double c = 0.0;             // 1 - 1/gamma
    double inv_gamma = 0.0;
    double gamma = 0.0;
    double trigger_coef = 0.0;  // x*(q) = trigger_coef q^(1/gamma)
    double K = 0.0;
    const PolicySpec* policies = nullptr;
    std::size_t n_policies = 0;
    bool antithetic = true;
    std::uint64_t seed = 0;
};

/// Simulates streams [first, first + count), count <= kLanes, writing into
/// the matching paths of `out` (two paths per stream when antithetic).
void simulate_block(const KernelSetup& setup, std::size_t first, std::size_t count,
                    PathBatch& out);

// Per-stream random numbers shared by the vector kernel and the scalar
// replay.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct Xoshiro256 {
    std::uint64_t s[4];

    static Xoshiro256 for_stream(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t sm = seed ^ (stream * 0xD1B54A32D192ED03ULL);
        Xoshiro256 g{};
        for (auto& word : g.s) word = splitmix64(sm);
        return g;
    }

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }
};

// Uniform on (0, 1] and [0, 1) from the top 53 bits.
inline double open_unit(std::uint64_t bits) {
    return static_cast<double>(static_cast<std::int64_t>(bits >> 11) + 1) * 0x1.0p-53;
}
inline double closed_unit(std::uint64_t bits) {
    return static_cast<double>(static_cast<std::int64_t>(bits >> 11)) * 0x1.0p-53;
}

}  // namespace wdro::detail
