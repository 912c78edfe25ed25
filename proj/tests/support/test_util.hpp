#pragma once

#include <cmath>
#include <random>

namespace wdro::test {

inline double rel_err(double actual, double expected) {
    const double denom = std::max(std::abs(expected), 1e-300);
    return std::abs(actual - expected) / denom;
}

/// Deterministic generator for property-style sweeps.
class Sampler {
public:
    explicit Sampler(unsigned seed) : engine_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

private:
    std::mt19937_64 engine_;
};

}  // namespace wdro::test
