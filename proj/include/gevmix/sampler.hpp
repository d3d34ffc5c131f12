#pragma once

// Blocked Gibbs sampler with fixed truncation for the Dirichlet-process
// mixture of GEV components. One sweep updates, in order: allocations,
// stick variables, component parameters (random-walk Metropolis on the
// transformed vector (mu, log sigma, xi)), and the precision alpha through
// its conjugate Gamma conditional. The interval-censored variant replaces
// point densities with interval masses throughout.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gevmix/data.hpp"
#include "gevmix/gev.hpp"
#include "gevmix/mixture.hpp"
#include "gevmix/normal.hpp"
#include "gevmix/rng.hpp"

namespace gevmix {

struct NormalPrior {
    double mean = 0.0;
    double variance = 1e4;
};

struct PriorSpec {
    NormalPrior location{0.0, 1e4};
    NormalPrior log_scale{0.0, 1e4};
    NormalPrior shape{0.0, 100.0};  // truncated to (-1/2, inf)
    double alpha_shape = 1.0;
    double alpha_rate = 1.0;

    void validate() const {
        if (!(location.variance > 0.0) || !(log_scale.variance > 0.0) ||
            !(shape.variance > 0.0)) {
            throw std::invalid_argument("PriorSpec: prior variances must be positive");
        }
        if (!(alpha_shape > 0.0) || !(alpha_rate > 0.0)) {
            throw std::invalid_argument("PriorSpec: alpha prior parameters must be positive");
        }
    }
};

struct ProposalScales {
    double location;
    double log_scale;
    double shape;
};

struct ChainConfig {
    std::size_t truncation = 50;
    std::size_t n_iter = 30000;
    std::optional<std::size_t> burn_in;  // defaults to n_iter / 2
    std::size_t thin = 1;
    std::optional<ProposalScales> proposal_scales;  // defaults from data spread
    bool adapt = true;
    std::optional<std::size_t> adapt_window;  // defaults to the burn-in
    std::uint64_t seed = 1;
    std::optional<double> censor_delta;

    std::size_t effective_burn_in() const { return burn_in ? *burn_in : n_iter / 2; }

    void validate() const {
        if (truncation < 2) {
            throw std::invalid_argument("ChainConfig: truncation must be at least 2");
        }
        if (n_iter < 1 || thin < 1) {
            throw std::invalid_argument("ChainConfig: n_iter and thin must be positive");
        }
        if (effective_burn_in() >= n_iter) {
            throw std::invalid_argument("ChainConfig: burn-in must be smaller than n_iter");
        }
        if (censor_delta && !(*censor_delta > 0.0)) {
            throw std::invalid_argument("ChainConfig: censor_delta must be positive");
        }
    }
};

struct MixtureState {
    StickWeights sticks;
    std::vector<GevParams> components;
    std::vector<std::size_t> allocations;  // one index in [0, K) per observation
    double alpha = 1.0;

    std::size_t truncation() const { return components.size(); }

    std::vector<std::size_t> occupancy_counts() const {
        std::vector<std::size_t> n(components.size(), 0);
        for (std::size_t c : allocations) ++n[c];
        return n;
    }
};

struct AcceptanceStats {
    std::uint64_t proposed = 0;
    std::uint64_t accepted = 0;

    double rate() const {
        return proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
    }
};

/// One retained posterior draw: everything the diagnostics consume.
struct DrawSnapshot {
    std::size_t iteration = 0;
    std::vector<GevParams> components;
    StickWeights sticks;
    double alpha = 0.0;
    std::vector<std::size_t> counts;  // per-component occupancy

    GevMixture mixture() const { return GevMixture(components, sticks); }

    std::size_t occupied() const {
        std::size_t n = 0;
        for (std::size_t c : counts) n += (c > 0) ? 1 : 0;
        return n;
    }
};

struct PosteriorDraws {
    std::vector<DrawSnapshot> draws;
    AcceptanceStats component_acceptance;       // whole chain
    AcceptanceStats retained_acceptance;        // post burn-in only
    double final_scale_multiplier = 1.0;        // Robbins-Monro end state
    ChainConfig config;

    std::size_t size() const { return draws.size(); }
};

// ---------------------------------------------------------------------------
// Priors
// ---------------------------------------------------------------------------

namespace detail {

inline double truncated_shape_log_norm(const NormalPrior& shape_prior) {
    const double sd = std::sqrt(shape_prior.variance);
    const double a = (-0.5 - shape_prior.mean) / sd;
    return std::log1p(-std_normal_cdf(a));
}

}  // namespace detail

/// Log prior density of the transformed vector (mu, phi = log sigma, xi);
/// -inf outside the parameter space. This is the density the Metropolis
/// step targets.
inline double log_prior_transformed(double mu, double phi, double xi,
                                    const PriorSpec& priors) {
    if (!(xi > -0.5)) return kNegInf;
    return normal_logpdf(mu, priors.location.mean, priors.location.variance) +
           normal_logpdf(phi, priors.log_scale.mean, priors.log_scale.variance) +
           normal_logpdf(xi, priors.shape.mean, priors.shape.variance) -
           detail::truncated_shape_log_norm(priors.shape);
}

/// Log prior of a component's parameters: independent normals on mu and
/// log sigma, a normal truncated to (-1/2, inf) on xi.
inline double log_prior(const GevParams& theta, const PriorSpec& priors) {
    return log_prior_transformed(theta.location(), std::log(theta.scale()), theta.shape(),
                                 priors);
}

/// Fresh draw from the component-parameter prior.
inline GevParams sample_prior(const PriorSpec& priors, RngStream& rng) {
    for (;;) {
        const double mu = rng.normal(priors.location.mean, std::sqrt(priors.location.variance));
        const double phi =
            rng.normal(priors.log_scale.mean, std::sqrt(priors.log_scale.variance));
        const double sd = std::sqrt(priors.shape.variance);
        const double a = (-0.5 - priors.shape.mean) / sd;
        const double pa = std_normal_cdf(a);
        const double u = std::min(pa + rng.uniform01() * (1.0 - pa),
                                  std::nextafter(1.0, 0.0));
        const double xi = priors.shape.mean + sd * std_normal_quantile(u);
        const double sigma = std::exp(phi);
        // phi beyond ~709 overflows sigma; retry (prior probability ~1e-12)
        if (std::isfinite(mu) && std::isfinite(sigma) && sigma > 0.0 && xi > -0.5 &&
            std::isfinite(xi)) {
            return GevParams(mu, sigma, xi);
        }
    }
}

// ---------------------------------------------------------------------------
// Likelihood terms
// ---------------------------------------------------------------------------

namespace detail {

inline double obs_loglik(double z, const GevParams& theta,
                         const std::optional<double>& censor_delta) {
    if (censor_delta) {
        return gev_interval_logprob(z - *censor_delta, z + *censor_delta, theta);
    }
    return gev_logpdf(z, theta);
}

// Unnormalized log posterior of one component given its allocated
// observations, parametrized by the transformed vector.
inline double component_log_target(double mu, double phi, double xi,
                                   const std::vector<double>& values,
                                   const std::vector<std::size_t>& members,
                                   const PriorSpec& priors,
                                   const std::optional<double>& censor_delta) {
    double t = log_prior_transformed(mu, phi, xi, priors);
    if (t == kNegInf) return kNegInf;
    const double sigma = std::exp(phi);
    if (!(std::isfinite(sigma) && sigma > 0.0)) return kNegInf;
    const GevParams theta(mu, sigma, xi);
    for (std::size_t i : members) {
        t += obs_loglik(values[i], theta, censor_delta);
        if (t == kNegInf) return kNegInf;
    }
    return t;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Conditional updates
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<double> log_weights(const StickWeights& sticks) {
    std::vector<double> log_pi(sticks.pi.size());
    for (std::size_t k = 0; k < sticks.pi.size(); ++k) {
        log_pi[k] = (sticks.pi[k] > 0.0) ? std::log(sticks.pi[k]) : kNegInf;
    }
    return log_pi;
}

// Unnormalized allocation log-weights log pi_k + log mass of z under
// component k. Returns false when every entry is -inf.
inline bool allocation_log_weights(const MixtureState& state,
                                   const std::vector<double>& log_pi, double z,
                                   const std::optional<double>& censor_delta,
                                   std::vector<double>& logw) {
    const std::size_t K = state.truncation();
    logw.resize(K);
    bool any = false;
    for (std::size_t k = 0; k < K; ++k) {
        if (log_pi[k] == kNegInf) {
            logw[k] = kNegInf;
            continue;
        }
        logw[k] = log_pi[k] + obs_loglik(z, state.components[k], censor_delta);
        any = any || (logw[k] > kNegInf);
    }
    return any;
}

}  // namespace detail

/// Normalized allocation probabilities of one observation across the K
/// components (exact densities, or interval masses in censored mode).
/// Throws when no component carries any mass.
inline std::vector<double> allocation_probabilities(const MixtureState& state, double z,
                                                    const std::optional<double>& censor_delta) {
    std::vector<double> logw;
    if (!detail::allocation_log_weights(state, detail::log_weights(state.sticks), z,
                                        censor_delta, logw)) {
        throw std::runtime_error("allocation_probabilities: zero mass under every component");
    }
    double m = kNegInf;
    for (double lw : logw) m = std::max(m, lw);
    double total = 0.0;
    std::vector<double> probs(logw.size());
    for (std::size_t k = 0; k < logw.size(); ++k) {
        probs[k] = std::exp(logw[k] - m);
        total += probs[k];
    }
    for (double& p : probs) p /= total;
    return probs;
}

/// Reallocates every observation to a component drawn from its categorical
/// conditional (exact densities, or interval masses in censored mode).
/// An observation with zero mass under every component triggers prior
/// redraws of the currently empty components until it is supported.
inline void sample_allocations(MixtureState& state, const BlockMaximaSeries& data,
                               const PriorSpec& priors,
                               const std::optional<double>& censor_delta, RngStream& rng) {
    const std::size_t K = state.truncation();
    const std::vector<double> log_pi = detail::log_weights(state.sticks);
    std::vector<double> logw(K);
    const auto fill_logw = [&](double z) {
        return detail::allocation_log_weights(state, log_pi, z, censor_delta, logw);
    };

    for (std::size_t i = 0; i < data.size(); ++i) {
        const double z = data.values[i];
        if (!fill_logw(z)) {
            // Transient degeneracy: rescue by redrawing empty components
            // from the prior until some component supports z.
            const auto counts = state.occupancy_counts();
            std::vector<std::size_t> empties;
            for (std::size_t k = 0; k < K; ++k) {
                if (counts[k] == 0) empties.push_back(k);
            }
            bool supported = false;
            for (int attempt = 0; attempt < 100 && !empties.empty() && !supported; ++attempt) {
                for (std::size_t k : empties) {
                    state.components[k] = sample_prior(priors, rng);
                }
                supported = fill_logw(z);
            }
            if (!supported) {
                throw std::runtime_error("sample_allocations: observation " +
                                         std::to_string(i) +
                                         " unsupported by all components");
            }
        }
        state.allocations[i] = rng.categorical_from_log(logw);
    }
}

/// Conjugate stick update: V_k ~ Beta(1 + n_k, alpha + sum_{l>k} n_l),
/// V_K forced to one. Sticks are clamped below one so the alpha update's
/// Gamma rate stays finite.
inline void sample_sticks(MixtureState& state, RngStream& rng) {
    const std::size_t K = state.truncation();
    const auto counts = state.occupancy_counts();
    std::vector<std::size_t> tail(K, 0);
    for (std::size_t k = K - 1; k-- > 0;) {
        tail[k] = tail[k + 1] + counts[k + 1];
    }
    std::vector<double> v(K);
    for (std::size_t k = 0; k + 1 < K; ++k) {
        const double draw = rng.beta(1.0 + static_cast<double>(counts[k]),
                                     state.alpha + static_cast<double>(tail[k]));
        v[k] = std::min(draw, 1.0 - 1e-15);
    }
    v[K - 1] = 1.0;
    state.sticks = stick_to_weights(std::move(v));
}

/// Metropolis-within-Gibbs update of the component parameters: one joint
/// random-walk proposal on (mu, log sigma, xi) per occupied component,
/// fresh prior draws for empty ones. Returns acceptance counts over the
/// occupied components.
inline AcceptanceStats sample_components(MixtureState& state, const BlockMaximaSeries& data,
                                         const PriorSpec& priors,
                                         const ProposalScales& scales,
                                         const std::optional<double>& censor_delta,
                                         RngStream& rng) {
    const std::size_t K = state.truncation();
    std::vector<std::vector<std::size_t>> members(K);
    for (std::size_t i = 0; i < data.size(); ++i) {
        members[state.allocations[i]].push_back(i);
    }
    AcceptanceStats stats;
    for (std::size_t k = 0; k < K; ++k) {
        if (members[k].empty()) {
            state.components[k] = sample_prior(priors, rng);
            continue;
        }
        const GevParams& cur = state.components[k];
        const double mu = cur.location();
        const double phi = std::log(cur.scale());
        const double xi = cur.shape();
        const double cur_target = detail::component_log_target(
            mu, phi, xi, data.values, members[k], priors, censor_delta);
        const double mu_p = mu + scales.location * rng.normal();
        const double phi_p = phi + scales.log_scale * rng.normal();
        const double xi_p = xi + scales.shape * rng.normal();
        const double prop_target = detail::component_log_target(
            mu_p, phi_p, xi_p, data.values, members[k], priors, censor_delta);
        ++stats.proposed;
        const double log_u = std::log(rng.uniform01());
        if (log_u < prop_target - cur_target) {
            state.components[k] = GevParams(mu_p, std::exp(phi_p), xi_p);
            ++stats.accepted;
        }
    }
    return stats;
}

/// Conjugate precision update under the truncated stick-breaking
/// representation: alpha ~ Gamma(a + K - 1, b - sum_{k<K} log(1 - V_k)).
inline void sample_alpha(MixtureState& state, const PriorSpec& priors, RngStream& rng) {
    const std::size_t K = state.truncation();
    double rate = priors.alpha_rate;
    for (std::size_t k = 0; k + 1 < K; ++k) {
        rate -= std::log1p(-state.sticks.v[k]);
    }
    const double shape = priors.alpha_shape + static_cast<double>(K - 1);
    state.alpha = rng.gamma(shape, rate);
}

namespace detail {

inline double interquartile_range(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const auto quartile = [&](double q) {
        const double h = q * (static_cast<double>(values.size()) - 1.0);
        const std::size_t i = static_cast<std::size_t>(h);
        const double frac = h - static_cast<double>(i);
        if (i + 1 >= values.size()) return values.back();
        return values[i] + frac * (values[i + 1] - values[i]);
    };
    return quartile(0.75) - quartile(0.25);
}

inline ProposalScales effective_scales(const ChainConfig& config,
                                       const BlockMaximaSeries& data) {
    if (config.proposal_scales) return *config.proposal_scales;
    const double iqr = interquartile_range(data.values);
    return ProposalScales{std::max(0.05 * iqr, 1e-3), 0.2, 0.1};
}

inline std::optional<double> effective_censor_delta(const ChainConfig& config,
                                                    const BlockMaximaSeries& data) {
    return config.censor_delta ? config.censor_delta : data.censor_delta;
}

}  // namespace detail

/// One full blocked-Gibbs sweep: allocations, sticks, components, alpha.
inline AcceptanceStats gibbs_sweep(MixtureState& state, const BlockMaximaSeries& data,
                                   const PriorSpec& priors, const ChainConfig& config,
                                   RngStream& rng) {
    const auto delta = detail::effective_censor_delta(config, data);
    const auto scales = detail::effective_scales(config, data);
    sample_allocations(state, data, priors, delta, rng);
    sample_sticks(state, rng);
    const AcceptanceStats stats =
        sample_components(state, data, priors, scales, delta, rng);
    sample_alpha(state, priors, rng);
    return stats;
}

// ---------------------------------------------------------------------------
// Chain driver
// ---------------------------------------------------------------------------

/// Overdispersed-but-sane start: observations quantile-binned into at most
/// five clusters, each cluster seeding one component from its median and
/// interquartile range, remaining slots drawn from the prior.
inline MixtureState initial_state(const BlockMaximaSeries& data, const PriorSpec& priors,
                                  const ChainConfig& config, RngStream& rng) {
    const std::size_t K = config.truncation;
    const std::size_t m = data.size();
    const std::size_t n_bins = std::min<std::size_t>(K, std::min<std::size_t>(m, 5));

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return data.values[a] < data.values[b]; });

    MixtureState state;
    state.allocations.assign(m, 0);
    std::vector<std::vector<double>> cluster_values(n_bins);
    for (std::size_t rank = 0; rank < m; ++rank) {
        const std::size_t bin = std::min(n_bins - 1, rank * n_bins / m);
        state.allocations[order[rank]] = bin;
        cluster_values[bin].push_back(data.values[order[rank]]);
    }

    state.components.reserve(K);
    for (std::size_t k = 0; k < n_bins; ++k) {
        auto& vals = cluster_values[k];  // already sorted
        const double median = vals[vals.size() / 2];
        const double iqr = vals[(3 * vals.size()) / 4] - vals[vals.size() / 4];
        state.components.emplace_back(median, std::max(iqr / 2.0, 1e-3), 0.1);
    }
    for (std::size_t k = n_bins; k < K; ++k) {
        state.components.push_back(sample_prior(priors, rng));
    }

    state.alpha = priors.alpha_shape / priors.alpha_rate;
    std::vector<double> v(K, 1.0 / (1.0 + state.alpha));  // prior-mean sticks
    v[K - 1] = 1.0;
    state.sticks = stick_to_weights(std::move(v));
    return state;
}

/// Runs the full chain and retains post-burn-in thinned snapshots. Fully
/// reproducible given the stream's seed.
inline PosteriorDraws run_chain(const BlockMaximaSeries& data, const PriorSpec& priors,
                                const ChainConfig& config, RngStream& rng) {
    data.validate();
    priors.validate();
    config.validate();

    const std::size_t burn_in = config.effective_burn_in();
    const auto delta = detail::effective_censor_delta(config, data);
    const auto base_scales = detail::effective_scales(config, data);
    const std::size_t adapt_until =
        config.adapt ? std::min(config.adapt_window ? *config.adapt_window : burn_in, burn_in)
                     : 0;

    MixtureState state = initial_state(data, priors, config, rng);

    PosteriorDraws out;
    out.config = config;
    out.draws.reserve((config.n_iter - burn_in) / config.thin);

    double log_mult = 0.0;
    for (std::size_t t = 1; t <= config.n_iter; ++t) {
        const double mult = std::exp(log_mult);
        const ProposalScales scales{base_scales.location * mult, base_scales.log_scale * mult,
                                    base_scales.shape * mult};
        sample_allocations(state, data, priors, delta, rng);
        sample_sticks(state, rng);
        const AcceptanceStats sweep = sample_components(state, data, priors, scales, delta, rng);
        sample_alpha(state, priors, rng);

        out.component_acceptance.proposed += sweep.proposed;
        out.component_acceptance.accepted += sweep.accepted;
        if (t <= adapt_until && sweep.proposed > 0) {
            // Robbins-Monro drift toward 0.25 acceptance; frozen after the
            // adaptation window so the retained chain is Markov.
            const double gamma_t = std::pow(static_cast<double>(t), -0.6);
            log_mult += gamma_t * (sweep.rate() - 0.25);
            log_mult = std::min(10.0, std::max(-10.0, log_mult));
        }
        if (t > burn_in) {
            out.retained_acceptance.proposed += sweep.proposed;
            out.retained_acceptance.accepted += sweep.accepted;
            if ((t - burn_in) % config.thin == 0) {
                out.draws.push_back(DrawSnapshot{t, state.components, state.sticks, state.alpha,
                                                 state.occupancy_counts()});
            }
        }
    }
    out.final_scale_multiplier = std::exp(log_mult);
    return out;
}

}  // namespace gevmix
