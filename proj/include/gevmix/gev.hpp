#pragma once

// Domain-extended generalized extreme value distribution.
//
// The distribution function is evaluated on the whole real line: exactly 0
// at or below the lower support endpoint, exactly 1 at or above the upper
// one. The shape parameter is restricted to xi > -1/2, the space on which
// the mixing measure of the mixture model lives. Everything is computed in
// log space through the exponent A(z) = -log G(z), which gives a single
// stable code path for the CDF, the density, and interval probabilities.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gevmix/rng.hpp"

namespace gevmix {

/// Shapes with |xi| below this evaluate the Gumbel limiting forms. Keeps
/// (1 + xi w)^(-1/xi) away from catastrophic cancellation while staying
/// continuous across xi = 0 to well under 1e-6.
inline constexpr double kGumbelShapeTol = 1e-8;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

class GevParams {
public:
    GevParams(double location, double scale, double shape)
        : location_(location), scale_(scale), shape_(shape) {
        if (!std::isfinite(location)) {
            throw std::domain_error("GevParams: location must be finite");
        }
        if (!(std::isfinite(scale) && scale > 0.0)) {
            throw std::domain_error("GevParams: scale must be finite and positive");
        }
        if (!(std::isfinite(shape) && shape > -0.5)) {
            throw std::domain_error("GevParams: shape must be finite and > -1/2");
        }
    }

    double location() const { return location_; }
    double scale() const { return scale_; }
    double shape() const { return shape_; }

    bool is_gumbel() const { return std::fabs(shape_) < kGumbelShapeTol; }

private:
    double location_;
    double scale_;
    double shape_;
};

struct SupportBounds {
    double lower;
    double upper;
};

inline SupportBounds support_bounds(const GevParams& params) {
    if (params.is_gumbel()) return {kNegInf, kPosInf};
    const double edge = params.location() - params.scale() / params.shape();
    if (params.shape() > 0.0) return {edge, kPosInf};
    return {kNegInf, edge};
}

namespace detail {

// Exponent A(z) = -log G(z), decreasing in z, with A = +inf below the
// support and A = 0 above it.
inline double gev_neg_log_cdf(double z, const GevParams& params) {
    const double w = (z - params.location()) / params.scale();
    if (params.is_gumbel()) {
        return std::exp(-w);
    }
    const double xw = params.shape() * w;
    if (xw <= -1.0) {
        return (params.shape() > 0.0) ? kPosInf : 0.0;
    }
    return std::exp(-std::log1p(xw) / params.shape());
}

inline void require_finite(double z, const char* who) {
    if (!std::isfinite(z)) {
        throw std::domain_error(std::string(who) + ": argument must be finite");
    }
}

}  // namespace detail

inline double gev_cdf(double z, const GevParams& params) {
    detail::require_finite(z, "gev_cdf");
    return std::exp(-detail::gev_neg_log_cdf(z, params));
}

/// Log density; -inf outside the open support (including its endpoints).
inline double gev_logpdf(double z, const GevParams& params) {
    detail::require_finite(z, "gev_logpdf");
    const double w = (z - params.location()) / params.scale();
    if (params.is_gumbel()) {
        return -std::log(params.scale()) - w - std::exp(-w);
    }
    const double xw = params.shape() * w;
    if (xw <= -1.0) return kNegInf;
    const double lt = std::log1p(xw);
    return -std::log(params.scale()) - (1.0 / params.shape() + 1.0) * lt -
           std::exp(-lt / params.shape());
}

inline double gev_quantile(double p, const GevParams& params) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("gev_quantile: p must lie in (0, 1)");
    }
    const double log_y = std::log(-std::log(p));
    if (params.is_gumbel()) {
        return params.location() - params.scale() * log_y;
    }
    return params.location() +
           params.scale() * std::expm1(-params.shape() * log_y) / params.shape();
}

/// Inverse-transform draw; lands strictly inside the support.
inline double gev_sample(RngStream& rng, const GevParams& params) {
    return gev_quantile(rng.uniform01(), params);
}

/// log[G(zr) - G(zl)], the likelihood term for an interval-censored
/// observation. Endpoints may be infinite; -inf when the interval carries
/// no mass.
inline double gev_interval_logprob(double zl, double zr, const GevParams& params) {
    if (!(zl < zr)) {
        throw std::domain_error("gev_interval_logprob: requires zl < zr");
    }
    const double a_l = std::isinf(zl) ? kPosInf : detail::gev_neg_log_cdf(zl, params);
    const double a_r = std::isinf(zr) ? 0.0 : detail::gev_neg_log_cdf(zr, params);
    if (a_r == kPosInf) return kNegInf;       // whole interval below the support
    if (a_l == kPosInf) return -a_r;          // left endpoint carries zero mass
    const double d = a_l - a_r;               // >= 0 by monotonicity
    if (!(d > 0.0)) return kNegInf;
    return -a_r + std::log(-std::expm1(-d));
}

}  // namespace gevmix
