#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace jumplab {

/// Deterministic random source: mt19937_64 (bit-exact across platforms by the
/// standard) with explicit transforms, so streams never depend on libstdc++'s
/// distribution implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed), seed_mix_(seed) {}

    /// Uniform on (0, 1]: (x >> 11) maps to [0, 2^53), +1 shifts to (0, 2^53].
    double uniform() {
        return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform on [0, 1).
    double uniform_co() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    /// Unbiased integer in [0, n) by rejection.
    uint64_t below(uint64_t n) {
        uint64_t lim = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do { x = eng_(); } while (x >= lim);
        return x % n;
    }

    bool bernoulli(double p) { return uniform_co() < p; }

    /// Standard normal via Box-Muller (uses two draws per pair, caches the second).
    double normal() {
        if (have_spare_) { have_spare_ = false; return spare_; }
        double u1 = uniform(), u2 = uniform_co();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Exponential with given rate (mean 1/rate).
    double exponential(double rate) { return -std::log(uniform()) / rate; }

    /// Pareto with tail exponent alpha and minimum x_m: x_m * U^{-1/alpha}.
    double pareto(double alpha, double x_m = 1.0) {
        return x_m * std::pow(uniform(), -1.0 / alpha);
    }

    /// Poisson by inversion for small means, normal approximation never used:
    /// counting exponential arrivals keeps exactness for the means we need.
    int poisson(double mean) {
        double t = 0.0;
        int k = -1;
        do { t += exponential(1.0); ++k; } while (t < mean);
        return k;
    }

    uint64_t raw() { return eng_(); }

    /// Derive an independent child stream (for per-stock / per-day substreams).
    Rng child(uint64_t tag) const {
        // splitmix64 over (seed', tag) — decorrelates derived seeds.
        uint64_t z = seed_mix_ + tag * 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return Rng(z ^ (z >> 31));
    }

private:
    std::mt19937_64 eng_;
    uint64_t seed_mix_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace jumplab
