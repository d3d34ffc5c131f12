#pragma once

// Finite-truncation stick-breaking mixture of GEV components: weights from
// stick variables, mixture density/CDF, numerical quantile inversion, and
// sampling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gevmix/gev.hpp"
#include "gevmix/rng.hpp"
#include "gevmix/rootfind.hpp"

namespace gevmix {

/// Components below this weight are ignored when forming quantile brackets;
/// empty truncation slots carry prior-drawn parameters with vanishing weight.
inline constexpr double kWeightFloor = 1e-12;

struct StickWeights {
    std::vector<double> v;   // stick variables, v.back() == 1
    std::vector<double> pi;  // weights, pi[k] = v[k] * prod_{j<k}(1 - v[j])
};

/// Builds weights from stick variables. The last stick is forced to 1 so
/// the weights sum to one exactly.
inline StickWeights stick_to_weights(std::vector<double> v) {
    if (v.empty()) {
        throw std::domain_error("stick_to_weights: stick vector must be nonempty");
    }
    for (double vk : v) {
        if (!(vk >= 0.0 && vk <= 1.0)) {
            throw std::domain_error("stick_to_weights: sticks must lie in [0, 1]");
        }
    }
    v.back() = 1.0;
    StickWeights out;
    out.pi.resize(v.size());
    double remaining = 1.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        out.pi[k] = v[k] * remaining;
        remaining *= 1.0 - v[k];
    }
    out.v = std::move(v);
    return out;
}

struct GevMixture {
    GevMixture(std::vector<GevParams> components_in, StickWeights weights_in)
        : components(std::move(components_in)), weights(std::move(weights_in)) {
        if (components.empty() || components.size() != weights.pi.size()) {
            throw std::domain_error(
                "GevMixture: components and weights must be nonempty and equal-length");
        }
    }

    std::size_t size() const { return components.size(); }

    std::vector<GevParams> components;
    StickWeights weights;
};

inline double mixture_logpdf(double z, const GevMixture& mix) {
    double m = kNegInf;
    std::vector<double> terms;
    terms.reserve(mix.size());
    for (std::size_t k = 0; k < mix.size(); ++k) {
        const double w = mix.weights.pi[k];
        const double t = (w > 0.0) ? std::log(w) + gev_logpdf(z, mix.components[k]) : kNegInf;
        terms.push_back(t);
        m = std::max(m, t);
    }
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    return m + std::log(s);
}

inline double mixture_pdf(double z, const GevMixture& mix) {
    return std::exp(mixture_logpdf(z, mix));
}

inline double mixture_cdf(double z, const GevMixture& mix) {
    double s = 0.0;
    for (std::size_t k = 0; k < mix.size(); ++k) {
        s += mix.weights.pi[k] * gev_cdf(z, mix.components[k]);
    }
    return std::min(1.0, std::max(0.0, s));
}

/// Inverts the mixture CDF at p. The initial bracket spans the component
/// quantiles of the non-negligible components, tightened by the bounds
/// pi_k G_k(z_p) <= p and pi_k (1 - G_k(z_p)) <= 1 - p, which keep the
/// bracket narrow even when near-empty slots carry extreme scales; on CDF
/// plateaus at level p the infimum of the solution set is returned.
inline double mixture_quantile(double p, const GevMixture& mix) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("mixture_quantile: p must lie in (0, 1)");
    }
    const double p_max = std::nextafter(1.0, 0.0);
    double lo = kPosInf;
    double hi = kNegInf;
    double lo_bound = kNegInf;
    double hi_bound = kPosInf;
    for (std::size_t k = 0; k < mix.size(); ++k) {
        const double w = mix.weights.pi[k];
        if (w <= kWeightFloor) continue;
        const GevParams& comp = mix.components[k];
        const double q = gev_quantile(p, comp);
        lo = std::min(lo, q);
        hi = std::max(hi, q);
        // G_k(z_p) <= p / pi_k gives an upper bound per component
        if (p / w < p_max) {
            hi_bound = std::min(hi_bound, gev_quantile(std::max(p / w, p), comp));
        }
        // G_k(z_p) >= 1 - (1 - p) / pi_k gives a lower bound per component
        const double lower_prob = 1.0 - (1.0 - p) / w;
        if (lower_prob > 0.0) {
            lo_bound = std::max(lo_bound, gev_quantile(std::min(lower_prob, p), comp));
        }
    }
    if (!(lo <= hi)) {
        throw std::domain_error("mixture_quantile: mixture has no usable weight");
    }
    lo = std::max(lo, lo_bound);
    hi = std::min(hi, hi_bound);
    if (lo > hi) {  // bounds crossed by rounding; collapse and re-widen below
        lo = hi = 0.5 * (lo + hi);
    }
    // All contributing components share the same p-quantile (e.g. K = 1, or
    // identical components): that point is the mixture quantile exactly.
    if (lo == hi && std::fabs(mixture_cdf(lo, mix) - p) <= 1e-10) return lo;
    // The floored-out components carry at most K * kWeightFloor mass, which
    // can push the CDF at the bracket edges past p; widen until sound.
    const auto cdf = [&](double z) { return mixture_cdf(z, mix); };
    double step = std::max(1.0, 1e-6 * (std::fabs(lo) + std::fabs(hi)));
    for (int i = 0; i < 64 && cdf(lo) > p; ++i, step *= 2.0) lo -= step;
    step = std::max(1.0, 1e-6 * (std::fabs(lo) + std::fabs(hi)));
    for (int i = 0; i < 64 && cdf(hi) < p; ++i, step *= 2.0) hi += step;
    // Near-empty slots can put component quantiles dozens of orders of
    // magnitude apart. Localize first by bisecting in asinh coordinates
    // (each step crosses whole decades), then finish with the linear
    // solver. The bracket endpoints are always values whose CDF has been
    // evaluated directly, so no transform rounding can unsound them.
    double u_lo = std::asinh(lo);
    double u_hi = std::asinh(hi);
    for (int i = 0; i < 100 && u_hi - u_lo > 1e-3; ++i) {
        const double um = 0.5 * (u_lo + u_hi);
        const double zm = std::sinh(um);
        if (!(zm > lo && zm < hi)) break;
        if (cdf(zm) >= p) {
            u_hi = um;
            hi = zm;
        } else {
            u_lo = um;
            lo = zm;
        }
    }
    return detail::invert_monotone_cdf(cdf, p, lo, hi);
}

struct MixtureDraw {
    double value;
    std::size_t component;
};

inline MixtureDraw mixture_sample(RngStream& rng, const GevMixture& mix) {
    const std::size_t k = rng.categorical(mix.weights.pi);
    return {gev_sample(rng, mix.components[k]), k};
}

}  // namespace gevmix
