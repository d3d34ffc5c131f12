#pragma once

// Posterior functionals and model checks: pointwise density/CDF summaries
// with credible bands, return levels, Dunn-Smyth residuals, occupancy
// counts, integrated squared error, and Kolmogorov-Smirnov distances.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "gevmix/mixture.hpp"
#include "gevmix/normal.hpp"
#include "gevmix/sampler.hpp"

namespace gevmix {

struct CurveSummary {
    std::vector<double> grid;
    std::vector<double> median;
    std::vector<double> lower;
    std::vector<double> upper;
    double level = 0.95;
};

struct ReturnLevelCurve {
    std::vector<double> p;       // exceedance probabilities
    std::vector<double> x_axis;  // log(-log(1 - p))
    std::vector<double> median;
    std::vector<double> lower;
    std::vector<double> upper;
    double level = 0.95;
};

struct PosteriorCurves {
    CurveSummary density;
    CurveSummary cdf;
};

namespace detail {

// Linear-interpolation sample quantile (R type 7) of an unsorted copy.
inline double sample_quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const double h = q * (static_cast<double>(values.size()) - 1.0);
    const std::size_t i = static_cast<std::size_t>(h);
    if (i + 1 >= values.size()) return values.back();
    return values[i] + (h - static_cast<double>(i)) * (values[i + 1] - values[i]);
}

// Evenly spaced deterministic subsample of draw indices.
inline std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t subsample) {
    if (subsample == 0 || subsample >= n) {
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        return all;
    }
    std::vector<std::size_t> idx(subsample);
    for (std::size_t j = 0; j < subsample; ++j) {
        idx[j] = j * n / subsample;
    }
    return idx;
}

inline void summarize_pointwise(const std::vector<std::vector<double>>& per_draw,
                                double level, std::vector<double>& median,
                                std::vector<double>& lower, std::vector<double>& upper) {
    const std::size_t n_points = per_draw.empty() ? 0 : per_draw.front().size();
    median.resize(n_points);
    lower.resize(n_points);
    upper.resize(n_points);
    const double tail = (1.0 - level) / 2.0;
    std::vector<double> column(per_draw.size());
    for (std::size_t j = 0; j < n_points; ++j) {
        for (std::size_t d = 0; d < per_draw.size(); ++d) column[d] = per_draw[d][j];
        median[j] = sample_quantile(column, 0.5);
        lower[j] = sample_quantile(column, tail);
        upper[j] = sample_quantile(column, 1.0 - tail);
    }
}

}  // namespace detail

/// Default evaluation grid: 512 points from min - 0.1 range to
/// max + 0.5 range; the upper padding is wider because the right tail is
/// what an extremes analysis cares about.
inline std::vector<double> default_grid(const std::vector<double>& data,
                                        std::size_t n_points = 512) {
    const auto [mn, mx] = std::minmax_element(data.begin(), data.end());
    const double range = std::max(*mx - *mn, 1e-6);
    const double lo = *mn - 0.1 * range;
    const double hi = *mx + 0.5 * range;
    std::vector<double> grid(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_points - 1);
    }
    return grid;
}

/// Pointwise posterior median and equal-tailed credible bands of the
/// mixture density and CDF over a grid.
inline PosteriorCurves posterior_curves(const PosteriorDraws& draws,
                                        std::span<const double> grid, double level = 0.95,
                                        std::size_t subsample = 0) {
    if (draws.draws.empty()) {
        throw std::invalid_argument("posterior_curves: no retained draws");
    }
    if (!std::is_sorted(grid.begin(), grid.end())) {
        throw std::invalid_argument("posterior_curves: grid must be increasing");
    }
    const auto idx = detail::subsample_indices(draws.size(), subsample);
    std::vector<std::vector<double>> dens(idx.size()), cdfs(idx.size());
    for (std::size_t d = 0; d < idx.size(); ++d) {
        const GevMixture mix = draws.draws[idx[d]].mixture();
        dens[d].resize(grid.size());
        cdfs[d].resize(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j) {
            dens[d][j] = mixture_pdf(grid[j], mix);
            cdfs[d][j] = mixture_cdf(grid[j], mix);
        }
    }
    PosteriorCurves out;
    out.density.grid.assign(grid.begin(), grid.end());
    out.cdf.grid = out.density.grid;
    out.density.level = out.cdf.level = level;
    detail::summarize_pointwise(dens, level, out.density.median, out.density.lower,
                                out.density.upper);
    detail::summarize_pointwise(cdfs, level, out.cdf.median, out.cdf.lower, out.cdf.upper);
    return out;
}

/// Posterior return levels r_p solving F(r_p) = 1 - p per draw, summarized
/// pointwise. The default subsample of 100 draws matches the convention of
/// summarizing return-level uncertainty from a modest parameter sample.
inline ReturnLevelCurve return_levels(const PosteriorDraws& draws,
                                      std::span<const double> p_grid, double level = 0.95,
                                      std::size_t subsample = 100) {
    if (draws.draws.empty()) {
        throw std::invalid_argument("return_levels: no retained draws");
    }
    for (double p : p_grid) {
        if (!(p > 0.0 && p < 1.0)) {
            throw std::invalid_argument("return_levels: p must lie in (0, 1)");
        }
    }
    const auto idx = detail::subsample_indices(draws.size(), subsample);
    std::vector<std::vector<double>> levels(idx.size());
    for (std::size_t d = 0; d < idx.size(); ++d) {
        const GevMixture mix = draws.draws[idx[d]].mixture();
        levels[d].resize(p_grid.size());
        for (std::size_t j = 0; j < p_grid.size(); ++j) {
            try {
                levels[d][j] = mixture_quantile(1.0 - p_grid[j], mix);
            } catch (const QuantileError& e) {
                throw QuantileError(e.p, e.bracket_lo, e.bracket_hi,
                                    "return_levels: inversion failed at draw " +
                                        std::to_string(idx[d]) + ", p = " +
                                        std::to_string(p_grid[j]) + ": " + e.what());
            }
        }
    }
    ReturnLevelCurve out;
    out.p.assign(p_grid.begin(), p_grid.end());
    out.x_axis.resize(p_grid.size());
    for (std::size_t j = 0; j < p_grid.size(); ++j) {
        out.x_axis[j] = std::log(-std::log1p(-p_grid[j]));
    }
    out.level = level;
    detail::summarize_pointwise(levels, level, out.median, out.lower, out.upper);
    return out;
}

/// Dunn-Smyth residuals e_i = Phi^{-1}(Fhat(z_i)); standard normal under a
/// well-fitting model. Fitted CDF values are clamped away from 0 and 1.
inline std::vector<double> dunn_smyth_residuals(const std::function<double(double)>& fitted_cdf,
                                                std::span<const double> data) {
    std::vector<double> residuals(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        double u = fitted_cdf(data[i]);
        u = std::min(1.0 - 1e-12, std::max(1e-12, u));
        residuals[i] = std_normal_quantile(u);
    }
    return residuals;
}

inline std::size_t occupied_components(const MixtureState& state) {
    std::size_t n = 0;
    for (std::size_t c : state.occupancy_counts()) n += (c > 0) ? 1 : 0;
    return n;
}

/// Histogram of occupied-component counts over the retained draws.
inline std::map<std::size_t, std::size_t> occupied_histogram(const PosteriorDraws& draws) {
    std::map<std::size_t, std::size_t> hist;
    for (const auto& d : draws.draws) ++hist[d.occupied()];
    return hist;
}

/// Trapezoidal integral of the squared difference of two curves tabulated
/// on a common increasing grid (single-replicate integrated squared error).
inline double integrated_squared_error(std::span<const double> truth,
                                       std::span<const double> estimate,
                                       std::span<const double> grid) {
    if (grid.size() < 2 || truth.size() != grid.size() || estimate.size() != grid.size()) {
        throw std::invalid_argument(
            "integrated_squared_error: need matching grids with at least 2 points");
    }
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double a = truth[i] - estimate[i];
        const double b = truth[i + 1] - estimate[i + 1];
        total += 0.5 * (a * a + b * b) * (grid[i + 1] - grid[i]);
    }
    return total;
}

/// Kolmogorov-Smirnov sup distance between the empirical CDF of a sample
/// and a reference CDF.
inline double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) {
        throw std::invalid_argument("ks_distance: sample must be nonempty");
    }
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i + 1) / n));
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    }
    return d;
}

/// Ordered residuals paired with normal plotting positions Phi^{-1}((i - 1/2)/m),
/// the data behind a residual QQ display.
inline std::vector<std::pair<double, double>> qq_pairs(std::vector<double> residuals) {
    std::sort(residuals.begin(), residuals.end());
    std::vector<std::pair<double, double>> out(residuals.size());
    const double m = static_cast<double>(residuals.size());
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        out[i] = {std_normal_quantile((static_cast<double>(i) + 0.5) / m), residuals[i]};
    }
    return out;
}

}  // namespace gevmix
