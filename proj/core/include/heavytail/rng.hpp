#pragma once

// Deterministic sampling utilities. Distributions are produced by inverse
// CDF from raw 53-bit uniforms so that a given seed yields identical draws
// on every platform (std::*_distribution is implementation-defined).

#include <cmath>
#include <cstdint>
#include <random>

namespace heavytail {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // uniform on (0, 1); never returns 0 or 1
    double uniform() {
        const std::uint64_t bits = eng_() >> 11;  // 53 bits
        double u = (static_cast<double>(bits) + 0.5) * 0x1p-53;
        return u;
    }

    // Pareto with survival x^{-alpha} on [1, inf)
    double pareto(double alpha) { return std::pow(uniform(), -1.0 / alpha); }

    double exponential(double rate = 1.0) { return -std::log(uniform()) / rate; }

    bool bernoulli(double p) { return uniform() < p; }

    double normal() {
        // Box-Muller on deterministic uniforms; one value per call
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    std::uint64_t next_sub_seed() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

}  // namespace heavytail
