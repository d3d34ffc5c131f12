#pragma once

// Generators and analytic truth for the simulation experiments: the three
// benchmark scenarios (single GEV, two-component GEV mixture, normal plus
// Student-t mixture), heterogeneous exponential block maxima with their
// two-component Gumbel limit, and the Monte Carlo study harness.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "gevmix/data.hpp"
#include "gevmix/diagnostics.hpp"
#include "gevmix/gev.hpp"
#include "gevmix/mixture.hpp"
#include "gevmix/normal.hpp"
#include "gevmix/rng.hpp"
#include "gevmix/rootfind.hpp"
#include "gevmix/sampler.hpp"

namespace gevmix {

enum class ScenarioTag { A, B, C };

inline ScenarioTag scenario_tag_from_string(const std::string& s) {
    if (s == "A" || s == "a") return ScenarioTag::A;
    if (s == "B" || s == "b") return ScenarioTag::B;
    if (s == "C" || s == "c") return ScenarioTag::C;
    throw std::invalid_argument("unknown scenario tag: " + s);
}

inline const char* to_string(ScenarioTag tag) {
    switch (tag) {
        case ScenarioTag::A: return "A";
        case ScenarioTag::B: return "B";
        default: return "C";
    }
}

struct NormalParams {
    double mean;
    double sd;
};

struct StudentTParams {
    double dof;  // standard t: location 0, scale 1
};

using ComponentDist = std::variant<GevParams, NormalParams, StudentTParams>;

struct WeightedComponent {
    double weight;
    ComponentDist dist;
};

struct ScenarioSpec {
    ScenarioTag tag;
    std::vector<WeightedComponent> components;
    std::size_t sample_size = 1000;

    static ScenarioSpec make(ScenarioTag tag, std::size_t sample_size = 1000) {
        ScenarioSpec spec;
        spec.tag = tag;
        spec.sample_size = sample_size;
        switch (tag) {
            case ScenarioTag::A:
                spec.components = {{1.0, GevParams(10.0, 1.5, 0.2)}};
                break;
            case ScenarioTag::B:
                spec.components = {{0.7, GevParams(1.0, 1.5, -0.2)},
                                   {0.3, GevParams(18.0, 1.0, 0.4)}};
                break;
            case ScenarioTag::C:
                spec.components = {{0.25, NormalParams{4.0, 1.0}},
                                   {0.15, NormalParams{7.0, 1.0}},
                                   {0.6, StudentTParams{10.0}}};
                break;
        }
        return spec;
    }

    void validate() const {
        if (components.empty() || sample_size == 0) {
            throw std::invalid_argument("ScenarioSpec: empty scenario");
        }
        double total = 0.0;
        for (const auto& c : components) {
            if (!(c.weight >= 0.0)) {
                throw std::invalid_argument("ScenarioSpec: negative weight");
            }
            total += c.weight;
        }
        if (std::fabs(total - 1.0) > 1e-12) {
            throw std::invalid_argument("ScenarioSpec: weights must sum to 1");
        }
    }
};

namespace detail {

inline double component_pdf(const ComponentDist& dist, double z) {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GevParams>) {
                return std::exp(gev_logpdf(z, d));
            } else if constexpr (std::is_same_v<T, NormalParams>) {
                return std_normal_pdf((z - d.mean) / d.sd) / d.sd;
            } else {
                return students_t_pdf(z, d.dof);
            }
        },
        dist);
}

inline double component_cdf(const ComponentDist& dist, double z) {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GevParams>) {
                return gev_cdf(z, d);
            } else if constexpr (std::is_same_v<T, NormalParams>) {
                return std_normal_cdf((z - d.mean) / d.sd);
            } else {
                return students_t_cdf(z, d.dof);
            }
        },
        dist);
}

inline double component_sample(const ComponentDist& dist, RngStream& rng) {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GevParams>) {
                return gev_sample(rng, d);
            } else if constexpr (std::is_same_v<T, NormalParams>) {
                return rng.normal(d.mean, d.sd);
            } else {
                // t_nu = N / sqrt(chi2_nu / nu)
                const double z = rng.normal();
                const double chi2 = rng.gamma(d.dof / 2.0, 0.5);
                return z / std::sqrt(chi2 / d.dof);
            }
        },
        dist);
}

}  // namespace detail

inline double scenario_density(const ScenarioSpec& spec, double z) {
    double f = 0.0;
    for (const auto& c : spec.components) f += c.weight * detail::component_pdf(c.dist, z);
    return f;
}

inline double scenario_cdf(const ScenarioSpec& spec, double z) {
    double f = 0.0;
    for (const auto& c : spec.components) f += c.weight * detail::component_cdf(c.dist, z);
    return std::min(1.0, std::max(0.0, f));
}

/// Exact scenario quantile via bracketed inversion of the scenario CDF.
inline double scenario_quantile(const ScenarioSpec& spec, double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("scenario_quantile: p must lie in (0, 1)");
    }
    double lo = -1.0;
    double hi = 1.0;
    for (int i = 0; i < 200 && scenario_cdf(spec, lo) > p; ++i) lo = 2.0 * lo - 1.0;
    for (int i = 0; i < 200 && scenario_cdf(spec, hi) < p; ++i) hi = 2.0 * hi + 1.0;
    return detail::invert_monotone_cdf([&](double z) { return scenario_cdf(spec, z); }, p, lo,
                                       hi);
}

/// Draws a scenario sample, retaining the generating component of each
/// observation as a 1-based group label.
inline BlockMaximaSeries gen_scenario(const ScenarioSpec& spec, RngStream& rng) {
    spec.validate();
    std::vector<double> weights;
    weights.reserve(spec.components.size());
    for (const auto& c : spec.components) weights.push_back(c.weight);
    BlockMaximaSeries out;
    out.values.reserve(spec.sample_size);
    out.group_labels.reserve(spec.sample_size);
    for (std::size_t i = 0; i < spec.sample_size; ++i) {
        const std::size_t k = rng.categorical(weights);
        out.values.push_back(detail::component_sample(spec.components[k].dist, rng));
        out.group_labels.push_back(std::to_string(k + 1));
    }
    return out;
}

/// Heterogeneous exponential block maxima: each block picks a rate by the
/// group weights, then records the maximum of n_block exponential draws.
inline BlockMaximaSeries gen_exponential_block_maxima(std::size_t m_blocks,
                                                      std::size_t n_block,
                                                      const std::vector<double>& rates,
                                                      const std::vector<double>& weights,
                                                      RngStream& rng) {
    if (m_blocks == 0 || n_block == 0) {
        throw std::invalid_argument("gen_exponential_block_maxima: empty design");
    }
    if (rates.empty() || rates.size() != weights.size()) {
        throw std::invalid_argument(
            "gen_exponential_block_maxima: rates and weights must be nonempty and match");
    }
    double total = 0.0;
    for (double w : weights) total += w;
    if (std::fabs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("gen_exponential_block_maxima: weights must sum to 1");
    }
    for (double r : rates) {
        if (!(r > 0.0)) {
            throw std::invalid_argument("gen_exponential_block_maxima: rates must be positive");
        }
    }
    BlockMaximaSeries out;
    out.values.reserve(m_blocks);
    out.group_labels.reserve(m_blocks);
    for (std::size_t b = 0; b < m_blocks; ++b) {
        const std::size_t k = rng.categorical(weights);
        double mx = -kPosInf;
        for (std::size_t j = 0; j < n_block; ++j) {
            mx = std::max(mx, rng.exponential(rates[k]));
        }
        out.values.push_back(mx);
        out.group_labels.push_back(std::to_string(k + 1));
    }
    return out;
}

/// The limiting two-component Gumbel mixture of equal-weight exponential
/// block maxima with rates (1, 2): (1/2) Gumbel(log n, 1) plus
/// (1/2) Gumbel((1/2) log n, 1/2).
inline GevMixture eq6_limit_mixture(std::size_t n_block) {
    if (n_block < 2) {
        throw std::invalid_argument("eq6_limit_mixture: block size must be at least 2");
    }
    const double ln = std::log(static_cast<double>(n_block));
    std::vector<GevParams> components{GevParams(ln, 1.0, 0.0), GevParams(0.5 * ln, 0.5, 0.0)};
    return GevMixture(std::move(components), stick_to_weights({0.5, 1.0}));
}

// ---------------------------------------------------------------------------
// Monte Carlo study harness
// ---------------------------------------------------------------------------

struct ReplicateResult {
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    double ise = 0.0;           // squared error of the median density vs truth
    double q95_lower = 0.0;     // posterior band of the 0.95 quantile
    double q95_median = 0.0;
    double q95_upper = 0.0;
    std::size_t modal_occupied = 0;
    double modal_fraction = 0.0;
    std::map<std::size_t, std::size_t> occupied_hist;
    ReturnLevelCurve return_level;  // at the study's p grid
};

struct StudyOptions {
    std::vector<double> p_grid{0.05, 0.01};
    std::size_t curve_subsample = 200;
    std::size_t rl_subsample = 100;
    std::size_t workers = 1;
};

/// One full replicate: generate, fit, diagnose. The replicate's stream is
/// derived from the master seed, so results do not depend on scheduling.
inline ReplicateResult run_replicate(const ScenarioSpec& spec, std::size_t index,
                                     const PriorSpec& priors, const ChainConfig& base_config,
                                     const StudyOptions& options) {
    ReplicateResult res;
    res.replicate = index;
    res.seed = derive_stream_seed(base_config.seed, index);
    RngStream rng(res.seed);

    const BlockMaximaSeries data = gen_scenario(spec, rng);
    ChainConfig config = base_config;
    config.seed = res.seed;
    const PosteriorDraws draws = run_chain(data, priors, config, rng);

    const std::vector<double> grid = default_grid(data.values);
    const PosteriorCurves curves =
        posterior_curves(draws, grid, 0.95, options.curve_subsample);
    std::vector<double> truth(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) truth[j] = scenario_density(spec, grid[j]);
    res.ise = integrated_squared_error(truth, curves.density.median, grid);

    std::vector<double> p_grid = options.p_grid;
    std::size_t q95_pos = p_grid.size();
    for (std::size_t j = 0; j < p_grid.size(); ++j) {
        if (std::fabs(p_grid[j] - 0.05) < 1e-12) q95_pos = j;
    }
    if (q95_pos == p_grid.size()) p_grid.push_back(0.05);
    res.return_level = return_levels(draws, p_grid, 0.95, options.rl_subsample);
    res.q95_lower = res.return_level.lower[q95_pos];
    res.q95_median = res.return_level.median[q95_pos];
    res.q95_upper = res.return_level.upper[q95_pos];

    res.occupied_hist = occupied_histogram(draws);
    for (const auto& [count, freq] : res.occupied_hist) {
        if (freq > res.modal_fraction * static_cast<double>(draws.size())) {
            res.modal_occupied = count;
            res.modal_fraction =
                static_cast<double>(freq) / static_cast<double>(draws.size());
        }
    }
    return res;
}

/// Replicated one-sample experiments with independent replicate streams.
/// Results are indexed by replicate, so worker count affects scheduling
/// only, never output.
inline std::vector<ReplicateResult> monte_carlo_study(const ScenarioSpec& spec,
                                                      std::size_t n_replicates,
                                                      const PriorSpec& priors,
                                                      const ChainConfig& config,
                                                      const StudyOptions& options = {}) {
    spec.validate();
    if (n_replicates == 0) {
        throw std::invalid_argument("monte_carlo_study: need at least one replicate");
    }
    std::vector<ReplicateResult> results(n_replicates);
    const std::size_t workers = std::max<std::size_t>(1, options.workers);
    if (workers == 1) {
        for (std::size_t i = 0; i < n_replicates; ++i) {
            results[i] = run_replicate(spec, i, priors, config, options);
        }
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(std::min(workers, n_replicates));
    for (std::size_t w = 0; w < std::min(workers, n_replicates); ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n_replicates) return;
                results[i] = run_replicate(spec, i, priors, config, options);
            }
        });
    }
    for (auto& t : pool) t.join();
    return results;
}

}  // namespace gevmix
