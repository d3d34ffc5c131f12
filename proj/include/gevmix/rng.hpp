#pragma once

// Random stream with self-contained variate generators.
//
// All transformations from raw engine output are implemented here rather
// than through <random> distribution adaptors, whose output sequences are
// implementation-defined. mt19937_64 plus these transforms gives a stream
// that is bit-reproducible from the seed on any conforming platform.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "gevmix/normal.hpp"

namespace gevmix {

/// splitmix64 mixing step; used to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for substream `index` of a master seed. Used by the study harness
/// to give every replicate its own stream.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 1));
}

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1); never returns an endpoint.
    double uniform01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via inverse-CDF transform.
    double normal() { return std_normal_quantile(uniform01()); }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double exponential(double rate) {
        if (!(rate > 0.0)) throw std::domain_error("exponential: rate must be positive");
        return -std::log(uniform01()) / rate;
    }

    /// Gamma(shape, rate) by Marsaglia-Tsang squeeze; shape < 1 boosted
    /// through Gamma(shape + 1) * U^(1/shape).
    double gamma(double shape, double rate) {
        if (!(shape > 0.0) || !(rate > 0.0)) {
            throw std::domain_error("gamma: shape and rate must be positive");
        }
        if (shape < 1.0) {
            const double u = uniform01();
            return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x;
            double v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
        }
    }

    double beta(double a, double b) {
        const double x = gamma(a, 1.0);
        const double y = gamma(b, 1.0);
        return x / (x + y);
    }

    /// Draw an index with probability proportional to weights[i].
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) throw std::domain_error("categorical: weights must be nonnegative");
            total += w;
        }
        if (!(total > 0.0)) throw std::domain_error("categorical: all weights are zero");
        double u = uniform01() * total;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] > 0.0) last_positive = i;
        }
        for (std::size_t i = 0; i < weights.size(); ++i) {
            u -= weights[i];
            if (u <= 0.0 && weights[i] > 0.0) return i;
        }
        return last_positive;
    }

    /// Draw an index with probability proportional to exp(logw[i]);
    /// normalized internally via log-sum-exp. Throws if every entry is -inf.
    std::size_t categorical_from_log(std::span<const double> logw) {
        double m = -std::numeric_limits<double>::infinity();
        for (double lw : logw) m = std::max(m, lw);
        if (!(m > -std::numeric_limits<double>::infinity())) {
            throw std::domain_error("categorical_from_log: all log-weights are -inf");
        }
        scratch_.resize(logw.size());
        for (std::size_t i = 0; i < logw.size(); ++i) {
            scratch_[i] = std::exp(logw[i] - m);
        }
        return categorical(scratch_);
    }

private:
    std::mt19937_64 engine_;
    std::vector<double> scratch_;
};

}  // namespace gevmix
