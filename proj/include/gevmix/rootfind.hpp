#pragma once

// Bracketed inversion of monotone CDFs. Bisection with a false-position
// acceleration step on alternating iterations, so the worst case is still
// within a factor two of plain bisection. Convergence is declared on
// |F(z) - p| (scale-free) together with a bracket-width floor derived from
// the initial bracket; on a region where F is flat at level p the iteration
// converges to the infimum of the solution set.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace gevmix {

class QuantileError : public std::runtime_error {
public:
    QuantileError(double p, double lo, double hi, const std::string& what)
        : std::runtime_error(what + " (p=" + std::to_string(p) + ", bracket=[" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "])"),
          p(p),
          bracket_lo(lo),
          bracket_hi(hi) {}

    double p;
    double bracket_lo;
    double bracket_hi;
};

namespace detail {

inline double invert_monotone_cdf(const std::function<double(double)>& cdf, double p,
                                  double lo, double hi, double f_tol = 1e-10,
                                  int max_iter = 200) {
    double f_lo = cdf(lo);
    double f_hi = cdf(hi);
    const double lo0 = lo;
    const double hi0 = hi;
    if (!(f_lo <= p && p <= f_hi)) {
        throw QuantileError(p, lo0, hi0, "invert_monotone_cdf: bracket does not contain root");
    }
    const double z_tol = 4.0 * std::numeric_limits<double>::epsilon() *
                         std::max({1.0, std::fabs(lo), std::fabs(hi)});
    double f_at_hi = f_hi;
    for (int iter = 0; iter < max_iter; ++iter) {
        const double width = hi - lo;
        if (width <= z_tol && std::fabs(f_at_hi - p) <= f_tol) {
            return hi;
        }
        double z;
        if (iter % 2 == 1 && f_hi > f_lo) {
            // false-position candidate, clamped strictly inside the bracket
            z = lo + (p - f_lo) * width / (f_hi - f_lo);
            const double margin = 0.01 * width;
            z = std::min(std::max(z, lo + margin), hi - margin);
        } else {
            z = lo + 0.5 * width;
        }
        if (!(z > lo && z < hi)) {
            // No representable point strictly inside: hi is the smallest
            // double with F(hi) >= p. When F jumps across p between
            // adjacent doubles the CDF tolerance is unattainable and hi is
            // still the machine-exact generalized inverse.
            return hi;
        }
        const double f_z = cdf(z);
        if (f_z >= p) {
            hi = z;
            f_hi = f_z;
            f_at_hi = f_z;
        } else {
            lo = z;
            f_lo = f_z;
        }
    }
    throw QuantileError(p, lo0, hi0, "invert_monotone_cdf: iteration cap exceeded");
}

}  // namespace detail
}  // namespace gevmix
