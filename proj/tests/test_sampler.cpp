#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include "gevmix/sampler.hpp"
#include "gevmix/simdata.hpp"

using namespace gevmix;

namespace {

// CDF oracle from brute-force tabulation of an (unnormalized) density on a
// grid: trapezoid cumulative sums, normalized by total mass.
class GridCdf {
public:
    GridCdf(const std::function<double(double)>& density, double lo, double hi, int n) {
        x_.resize(n + 1);
        cum_.resize(n + 1);
        const double h = (hi - lo) / n;
        double prev = density(lo);
        x_[0] = lo;
        cum_[0] = 0.0;
        for (int i = 1; i <= n; ++i) {
            x_[i] = lo + h * i;
            const double cur = density(x_[i]);
            cum_[i] = cum_[i - 1] + 0.5 * (prev + cur) * h;
            prev = cur;
        }
        for (auto& c : cum_) c /= cum_.back();
    }

    double operator()(double z) const {
        if (z <= x_.front()) return 0.0;
        if (z >= x_.back()) return 1.0;
        const auto it = std::upper_bound(x_.begin(), x_.end(), z);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin());
        const double t = (z - x_[i - 1]) / (x_[i] - x_[i - 1]);
        return cum_[i - 1] + t * (cum_[i] - cum_[i - 1]);
    }

private:
    std::vector<double> x_;
    std::vector<double> cum_;
};

double ks_stat(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::fabs(f - (i + 1.0) / n));
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    }
    return d;
}

MixtureState make_state(std::vector<GevParams> comps, std::vector<double> sticks,
                        std::vector<std::size_t> allocations, double alpha) {
    MixtureState s;
    s.components = std::move(comps);
    s.sticks = stick_to_weights(std::move(sticks));
    s.allocations = std::move(allocations);
    s.alpha = alpha;
    return s;
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// standard error of a correlated chain mean via batch means
double batch_se(const std::vector<double>& chain, std::size_t n_batches = 40) {
    const std::size_t len = chain.size() / n_batches;
    std::vector<double> means(n_batches);
    for (std::size_t b = 0; b < n_batches; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += chain[b * len + i];
        means[b] = s / static_cast<double>(len);
    }
    return sd_of(means) / std::sqrt(static_cast<double>(n_batches));
}

}  // namespace

// ---------------------------------------------------------------------------
// Priors
// ---------------------------------------------------------------------------

TEST_CASE("log prior at the origin matches the frozen reference") {
    const PriorSpec priors;
    // two N(0, 1e4) log-densities at zero plus the renormalized truncated
    // N(0, 100) shape term; 40-digit evaluation
    CHECK(log_prior(GevParams(0.0, 1.0, 0.0), priors) ==
          Catch::Approx(-13.61569690917257).margin(1e-12));
}

TEST_CASE("log prior is -inf outside the shape truncation") {
    const PriorSpec priors;
    CHECK(log_prior_transformed(0.0, 0.0, -0.6, priors) == kNegInf);
    CHECK(log_prior_transformed(0.0, 0.0, -0.5, priors) == kNegInf);
    CHECK(log_prior_transformed(0.0, 0.0, -0.49, priors) > kNegInf);
}

TEST_CASE("log prior is symmetric in the location sign") {
    const PriorSpec priors;
    CHECK(log_prior(GevParams(3.7, 1.0, 0.1), priors) ==
          Catch::Approx(log_prior(GevParams(-3.7, 1.0, 0.1), priors)).margin(1e-13));
}

TEST_CASE("prior draws respect the parameter space") {
    const PriorSpec priors;
    RngStream rng(3);
    for (int i = 0; i < 5000; ++i) {
        const GevParams theta = sample_prior(priors, rng);
        CHECK(theta.scale() > 0.0);
        CHECK(theta.shape() > -0.5);
    }
}

TEST_CASE("prior spec validation") {
    PriorSpec bad;
    bad.alpha_rate = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    PriorSpec bad2;
    bad2.shape.variance = -1.0;
    CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Allocations
// ---------------------------------------------------------------------------

TEST_CASE("allocation probabilities match brute-force normalization") {
    const MixtureState state = make_state(
        {GevParams(0.0, 1.0, 0.1), GevParams(2.0, 0.5, -0.2), GevParams(-1.0, 2.0, 0.0)},
        {0.5, 0.4, 1.0}, {0, 0, 0}, 1.0);
    for (double z : {-0.5, 0.7, 1.9, 3.0}) {
        const auto probs = allocation_probabilities(state, z, std::nullopt);
        // independent route: linear-space products, direct normalization
        std::vector<double> brute(3);
        double total = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            brute[k] = state.sticks.pi[k] * std::exp(gev_logpdf(z, state.components[k]));
            total += brute[k];
        }
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(std::fabs(probs[k] - brute[k] / total) < 1e-12);
        }
    }
}

TEST_CASE("censored allocation probabilities match brute-force normalization") {
    const MixtureState state = make_state(
        {GevParams(1.0, 1.0, 0.2), GevParams(4.0, 2.0, -0.1)}, {0.6, 1.0}, {0, 0}, 1.0);
    const double delta = 0.05;
    for (double z : {0.5, 2.3, 5.1}) {
        const auto probs = allocation_probabilities(state, z, delta);
        std::vector<double> brute(2);
        double total = 0.0;
        for (std::size_t k = 0; k < 2; ++k) {
            const double mass = gev_cdf(z + delta, state.components[k]) -
                                gev_cdf(z - delta, state.components[k]);
            brute[k] = state.sticks.pi[k] * mass;
            total += brute[k];
        }
        for (std::size_t k = 0; k < 2; ++k) {
            CHECK(std::fabs(probs[k] - brute[k] / total) < 1e-12);
        }
    }
}

TEST_CASE("equal components give half-half allocation probabilities") {
    const MixtureState state = make_state(
        {GevParams(0.0, 1.0, 0.0), GevParams(0.0, 1.0, 0.0)}, {0.5, 1.0}, {0}, 1.0);
    const auto probs = allocation_probabilities(state, 0.3, std::nullopt);
    CHECK(probs[0] == Catch::Approx(0.5).margin(1e-14));
    CHECK(probs[1] == Catch::Approx(0.5).margin(1e-14));
}

TEST_CASE("degenerate weights force the allocation") {
    MixtureState state = make_state({GevParams(0.0, 1.0, 0.0), GevParams(0.0, 1.0, 0.0)},
                                    {1.0, 1.0}, {1, 1, 1}, 1.0);
    BlockMaximaSeries data;
    data.values = {0.1, -0.4, 2.0};
    RngStream rng(17);
    sample_allocations(state, data, PriorSpec{}, std::nullopt, rng);
    for (std::size_t c : state.allocations) CHECK(c == 0);
}

TEST_CASE("tiny censoring width reproduces exact allocation probabilities") {
    const MixtureState state = make_state(
        {GevParams(0.0, 1.0, 0.1), GevParams(3.0, 1.5, -0.2)}, {0.45, 1.0}, {0}, 1.0);
    // coarse-grid observations, as if rounded
    for (double z : {-1.0, 0.0, 1.0, 2.0, 3.0, 4.0}) {
        const auto exact = allocation_probabilities(state, z, std::nullopt);
        const auto censored = allocation_probabilities(state, z, 1e-8);
        for (std::size_t k = 0; k < exact.size(); ++k) {
            CHECK(std::fabs(exact[k] - censored[k]) < 1e-4);
        }
    }
}

TEST_CASE("allocation sampling frequencies follow the conditional") {
    MixtureState state = make_state(
        {GevParams(0.0, 1.0, 0.0), GevParams(1.0, 2.0, 0.1)}, {0.35, 1.0}, {0}, 1.0);
    BlockMaximaSeries data;
    data.values = {0.8};
    const auto probs = allocation_probabilities(state, 0.8, std::nullopt);
    RngStream rng(23);
    int count0 = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        sample_allocations(state, data, PriorSpec{}, std::nullopt, rng);
        count0 += (state.allocations[0] == 0) ? 1 : 0;
    }
    const double se = std::sqrt(probs[0] * (1.0 - probs[0]) / n);
    CHECK(std::fabs(count0 / static_cast<double>(n) - probs[0]) < 4.0 * se);
}

// ---------------------------------------------------------------------------
// Sticks
// ---------------------------------------------------------------------------

TEST_CASE("stick conditional matches the Beta(1 + n_k, alpha + tail) law") {
    // counts (3, 2, 0) with alpha = 1: V_1 ~ Beta(4, 3), V_2 ~ Beta(3, 1)
    MixtureState state = make_state(
        {GevParams(0.0, 1.0, 0.0), GevParams(1.0, 1.0, 0.0), GevParams(2.0, 1.0, 0.0)},
        {0.3, 0.3, 1.0}, {0, 0, 0, 1, 1}, 1.0);
    RngStream rng(29);
    const int n = 100000;
    std::vector<double> v1(n), v2(n);
    for (int i = 0; i < n; ++i) {
        sample_sticks(state, rng);
        v1[i] = state.sticks.v[0];
        v2[i] = state.sticks.v[1];
    }
    const GridCdf beta43([](double x) { return x * x * x * (1.0 - x) * (1.0 - x); }, 0.0, 1.0,
                         200000);
    const GridCdf beta31([](double x) { return x * x; }, 0.0, 1.0, 200000);
    CHECK(ks_stat(v1, beta43) < 0.02);
    CHECK(ks_stat(v2, beta31) < 0.02);

    // Beta-mean cross-check: E[V_1] = 4 / 7
    const double se = sd_of(v1) / std::sqrt(static_cast<double>(n));
    CHECK(std::fabs(mean_of(v1) - 4.0 / 7.0) < 3.0 * se);
}

TEST_CASE("stick conditional reduces to the prior with no data") {
    MixtureState state = make_state(
        {GevParams(0.0, 1.0, 0.0), GevParams(1.0, 1.0, 0.0), GevParams(2.0, 1.0, 0.0)},
        {0.3, 0.3, 1.0}, {}, 2.0);
    // zero observations: V_k ~ Beta(1, alpha) with alpha = 2
    RngStream rng(31);
    const int n = 100000;
    std::vector<double> v1(n);
    for (int i = 0; i < n; ++i) {
        sample_sticks(state, rng);
        v1[i] = state.sticks.v[0];
    }
    const GridCdf beta12([](double x) { return (1.0 - x); }, 0.0, 1.0, 200000);
    CHECK(ks_stat(v1, beta12) < 0.02);
    CHECK(state.sticks.v.back() == 1.0);
}

// ---------------------------------------------------------------------------
// Alpha
// ---------------------------------------------------------------------------

TEST_CASE("alpha conditional is Gamma(2, 2) for the unit-stick fixture") {
    // K = 2, V_1 = 1 - exp(-1): rate = 1 - log(1 - V_1) = 2, shape = 2
    MixtureState state = make_state({GevParams(0.0, 1.0, 0.0), GevParams(1.0, 1.0, 0.0)},
                                    {1.0 - std::exp(-1.0), 1.0}, {0}, 1.0);
    RngStream rng(37);
    const int n = 100000;
    std::vector<double> draws(n);
    for (int i = 0; i < n; ++i) {
        sample_alpha(state, PriorSpec{}, rng);
        draws[i] = state.alpha;
    }
    const GridCdf gamma22([](double x) { return x * std::exp(-2.0 * x); }, 0.0, 25.0, 400000);
    CHECK(ks_stat(draws, gamma22) < 0.02);
    const double se = sd_of(draws) / std::sqrt(static_cast<double>(n));
    CHECK(std::fabs(mean_of(draws) - 1.0) < 4.0 * se);
}

TEST_CASE("alpha conditional approaches the shape-inflated prior for vanishing sticks") {
    const std::size_t K = 5;
    MixtureState state;
    state.components.assign(K, GevParams(0.0, 1.0, 0.0));
    std::vector<double> v(K, 1e-14);
    v[K - 1] = 1.0;
    state.sticks = stick_to_weights(v);
    state.alpha = 1.0;
    RngStream rng(41);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sample_alpha(state, PriorSpec{}, rng);
        sum += state.alpha;
    }
    // Gamma(1 + K - 1, 1): mean K
    CHECK(sum / n == Catch::Approx(static_cast<double>(K)).epsilon(0.02));
}

// ---------------------------------------------------------------------------
// Component updates
// ---------------------------------------------------------------------------

TEST_CASE("zero proposal scale leaves occupied components unchanged") {
    MixtureState state = make_state(
        {GevParams(0.0, 1.0, 0.1), GevParams(5.0, 2.0, 0.0)}, {0.5, 1.0}, {0, 1, 0}, 1.0);
    BlockMaximaSeries data;
    data.values = {0.2, 5.5, -0.3};
    RngStream rng(43);
    const ProposalScales zero{0.0, 0.0, 0.0};
    const auto before = state.components;
    const AcceptanceStats stats =
        sample_components(state, data, PriorSpec{}, zero, std::nullopt, rng);
    CHECK(stats.proposed == 2);
    CHECK(stats.accepted == 2);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(state.components[k].location() == before[k].location());
        CHECK(state.components[k].scale() == before[k].scale());
        CHECK(state.components[k].shape() == before[k].shape());
    }
}

TEST_CASE("empty components are refreshed from the prior") {
    // moderate priors keep the moments testable
    PriorSpec priors;
    priors.location = {1.0, 4.0};
    priors.log_scale = {0.0, 0.25};
    priors.shape = {0.0, 0.04};
    MixtureState state = make_state(
        {GevParams(0.0, 1.0, 0.0), GevParams(1.0, 1.0, 0.0), GevParams(2.0, 1.0, 0.0)},
        {0.8, 0.5, 1.0}, {0, 0}, 1.0);
    BlockMaximaSeries data;
    data.values = {0.1, -0.2};
    RngStream rng(47);
    const ProposalScales scales{0.1, 0.1, 0.05};
    const int n = 10000;
    std::vector<double> mu_draws, xi_draws;
    for (int i = 0; i < n; ++i) {
        sample_components(state, data, priors, scales, std::nullopt, rng);
        mu_draws.push_back(state.components[1].location());
        xi_draws.push_back(state.components[1].shape());
    }
    // direct prior sampling as the oracle
    RngStream oracle_rng(48);
    std::vector<double> mu_direct, xi_direct;
    for (int i = 0; i < n; ++i) {
        const GevParams theta = sample_prior(priors, oracle_rng);
        mu_direct.push_back(theta.location());
        xi_direct.push_back(theta.shape());
    }
    const double se_mu = std::sqrt(sd_of(mu_draws) * sd_of(mu_draws) / n +
                                   sd_of(mu_direct) * sd_of(mu_direct) / n);
    CHECK(std::fabs(mean_of(mu_draws) - mean_of(mu_direct)) < 4.0 * se_mu);
    const double se_xi = std::sqrt(sd_of(xi_draws) * sd_of(xi_draws) / n +
                                   sd_of(xi_direct) * sd_of(xi_direct) / n);
    CHECK(std::fabs(mean_of(xi_draws) - mean_of(xi_direct)) < 4.0 * se_xi);
}

TEST_CASE("posterior concentrates near the truth with plenty of data") {
    // 5000 observations from a single GEV; the dominant component's
    // parameters should sit within a few posterior standard deviations
    const GevParams truth(10.0, 1.5, 0.2);
    RngStream data_rng(51);
    BlockMaximaSeries data;
    data.values.resize(5000);
    for (auto& z : data.values) z = gev_sample(data_rng, truth);

    ChainConfig config;
    config.truncation = 2;
    config.n_iter = 1500;
    config.burn_in = 750;
    config.seed = 99;
    RngStream rng(config.seed);
    const PosteriorDraws draws = run_chain(data, PriorSpec{}, config, rng);

    std::vector<double> mu, sigma, xi;
    for (const auto& d : draws.draws) {
        std::size_t top = 0;
        for (std::size_t k = 1; k < d.counts.size(); ++k) {
            if (d.counts[k] > d.counts[top]) top = k;
        }
        mu.push_back(d.components[top].location());
        sigma.push_back(d.components[top].scale());
        xi.push_back(d.components[top].shape());
    }
    CHECK(std::fabs(mean_of(mu) - truth.location()) < 3.0 * sd_of(mu));
    CHECK(std::fabs(mean_of(sigma) - truth.scale()) < 3.0 * sd_of(sigma));
    CHECK(std::fabs(mean_of(xi) - truth.shape()) < 3.0 * sd_of(xi));
}

// ---------------------------------------------------------------------------
// Sweeps and the chain driver
// ---------------------------------------------------------------------------

TEST_CASE("sweeps are deterministic given the seed") {
    BlockMaximaSeries data;
    data.values = {1.0, 2.0, 9.0, 11.5, 3.2};
    ChainConfig config;
    config.truncation = 4;
    config.n_iter = 10;
    config.burn_in = 0;

    const auto run = [&]() {
        RngStream rng(2024);
        MixtureState state = initial_state(data, PriorSpec{}, config, rng);
        for (int t = 0; t < 5; ++t) {
            gibbs_sweep(state, data, PriorSpec{}, config, rng);
        }
        return state;
    };
    const MixtureState a = run();
    const MixtureState b = run();
    CHECK(a.allocations == b.allocations);
    CHECK(a.alpha == b.alpha);
    for (std::size_t k = 0; k < a.components.size(); ++k) {
        CHECK(a.components[k].location() == b.components[k].location());
        CHECK(a.components[k].scale() == b.components[k].scale());
        CHECK(a.components[k].shape() == b.components[k].shape());
        CHECK(a.sticks.v[k] == b.sticks.v[k]);
    }
}

TEST_CASE("state invariants hold across randomized sweeps") {
    RngStream scenario_rng(57);
    for (int problem = 0; problem < 10; ++problem) {
        BlockMaximaSeries data;
        const std::size_t m = 5 + scenario_rng.next_u64() % 40;
        data.values.resize(m);
        for (auto& z : data.values) {
            z = scenario_rng.uniform(-5.0, 5.0) +
                ((scenario_rng.next_u64() % 2) ? 10.0 : 0.0);
        }
        ChainConfig config;
        config.truncation = 5;
        config.n_iter = 100;
        config.burn_in = 0;
        RngStream rng(1000 + problem);
        MixtureState state = initial_state(data, PriorSpec{}, config, rng);
        for (int t = 0; t < 100; ++t) {
            gibbs_sweep(state, data, PriorSpec{}, config, rng);
            double total = 0.0;
            for (double w : state.sticks.pi) {
                REQUIRE(w >= 0.0);
                total += w;
            }
            REQUIRE(std::fabs(total - 1.0) < 1e-12);
            REQUIRE(state.alpha > 0.0);
            for (std::size_t i = 0; i < m; ++i) {
                REQUIRE(gev_logpdf(data.values[i], state.components[state.allocations[i]]) >
                        kNegInf);
            }
        }
    }
}

TEST_CASE("retained draw count follows iterations, burn-in and thinning") {
    BlockMaximaSeries data;
    data.values = {0.5, 1.5, 2.5};
    ChainConfig config;
    config.truncation = 3;
    config.n_iter = 30;  // defaults: burn_in = 15, thin = 1
    RngStream rng(7);
    const PosteriorDraws draws = run_chain(data, PriorSpec{}, config, rng);
    CHECK(draws.size() == 15);
    CHECK(draws.draws.front().iteration == 16);
    CHECK(draws.draws.back().iteration == 30);

    ChainConfig thinned = config;
    thinned.thin = 5;
    RngStream rng2(7);
    CHECK(run_chain(data, PriorSpec{}, thinned, rng2).size() == 3);
}

TEST_CASE("default 30000-iteration configuration retains 15000 draws") {
    BlockMaximaSeries data;
    data.values = {1.0, 2.0, 3.0};
    ChainConfig config;  // paper-scale defaults
    config.truncation = 3;
    RngStream rng(11);
    const PosteriorDraws draws = run_chain(data, PriorSpec{}, config, rng);
    CHECK(config.n_iter == 30000);
    CHECK(draws.size() == 15000);
}

TEST_CASE("chain configuration validation") {
    ChainConfig config;
    config.truncation = 1;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    ChainConfig config2;
    config2.burn_in = config2.n_iter;
    CHECK_THROWS_AS(config2.validate(), std::invalid_argument);
    ChainConfig config3;
    config3.censor_delta = -0.1;
    CHECK_THROWS_AS(config3.validate(), std::invalid_argument);

    BlockMaximaSeries bad;
    bad.values = {1.0, std::numeric_limits<double>::quiet_NaN()};
    RngStream rng(1);
    CHECK_THROWS_AS(run_chain(bad, PriorSpec{}, ChainConfig{}, rng), std::invalid_argument);
}

TEST_CASE("single-group data keeps one occupied component modal") {
    const ScenarioSpec spec = ScenarioSpec::make(ScenarioTag::A, 150);
    RngStream rng(61);
    const BlockMaximaSeries data = gen_scenario(spec, rng);
    ChainConfig config;
    config.truncation = 10;
    config.n_iter = 800;
    config.seed = 61;
    const PosteriorDraws draws = run_chain(data, PriorSpec{}, config, rng);
    std::map<std::size_t, std::size_t> hist;
    for (const auto& d : draws.draws) ++hist[d.occupied()];
    std::size_t modal = 0;
    std::size_t best = 0;
    for (const auto& [count, freq] : hist) {
        if (freq > best) {
            best = freq;
            modal = count;
        }
    }
    CHECK(modal == 1);
}

TEST_CASE("censored-mode chain keeps interval support for every allocation") {
    RngStream data_rng(67);
    BlockMaximaSeries data;
    const GevParams truth(5.0, 1.0, 0.1);
    data.values.resize(120);
    for (auto& z : data.values) {
        z = std::round(gev_sample(data_rng, truth) * 10.0) / 10.0;  // one decimal
    }
    data.censor_delta = 0.05;
    ChainConfig config;
    config.truncation = 6;
    config.n_iter = 300;
    config.burn_in = 150;
    RngStream rng(68);
    const PosteriorDraws draws = run_chain(data, PriorSpec{}, config, rng);
    CHECK(draws.size() == 150);

    // spot-check: final-state components give every observation interval mass
    MixtureState state;
    state.components = draws.draws.back().components;
    state.sticks = draws.draws.back().sticks;
    state.alpha = draws.draws.back().alpha;
    for (double z : data.values) {
        const auto probs = allocation_probabilities(state, z, data.censor_delta);
        double total = 0.0;
        for (double p : probs) total += p;
        CHECK(total == Catch::Approx(1.0).margin(1e-9));
    }
}

// ---------------------------------------------------------------------------
// Joint-distribution (successive-conditional) test
// ---------------------------------------------------------------------------

TEST_CASE("forward and successive-conditional simulations agree") {
    // Geweke-style check: (a) independent draws from the prior-predictive
    // joint, (b) a chain alternating one Gibbs sweep with resimulating the
    // data given (allocations, components). Both target the same joint, so
    // marginal statistics of (alpha, V_1, xi_1) must agree.
    PriorSpec priors;
    priors.location = {1.0, 1.0};
    priors.log_scale = {0.0, 0.3};
    priors.shape = {0.1, 0.04};
    priors.alpha_shape = 2.0;
    priors.alpha_rate = 1.0;

    const std::size_t K = 3;
    const std::size_t m = 8;
    ChainConfig config;
    config.truncation = K;
    config.n_iter = 2;
    config.burn_in = 0;
    config.adapt = false;
    config.proposal_scales = ProposalScales{0.4, 0.25, 0.12};

    const auto forward_draw = [&](RngStream& rng) {
        MixtureState state;
        state.alpha = rng.gamma(priors.alpha_shape, priors.alpha_rate);
        std::vector<double> v(K);
        for (std::size_t k = 0; k + 1 < K; ++k) v[k] = rng.beta(1.0, state.alpha);
        v[K - 1] = 1.0;
        state.sticks = stick_to_weights(v);
        for (std::size_t k = 0; k < K; ++k) {
            state.components.push_back(sample_prior(priors, rng));
        }
        state.allocations.resize(m);
        BlockMaximaSeries data;
        data.values.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            state.allocations[i] = rng.categorical(state.sticks.pi);
            data.values[i] = gev_sample(rng, state.components[state.allocations[i]]);
        }
        return std::pair{state, data};
    };

    const int n_forward = 30000;
    RngStream frng(2026);
    std::vector<double> f_alpha, f_v1, f_xi1;
    for (int i = 0; i < n_forward; ++i) {
        const auto [state, data] = forward_draw(frng);
        f_alpha.push_back(state.alpha);
        f_v1.push_back(state.sticks.v[0]);
        f_xi1.push_back(state.components[0].shape());
    }

    const int n_chain = 30000;
    RngStream crng(2027);
    auto [state, data] = forward_draw(crng);
    std::vector<double> c_alpha, c_v1, c_xi1;
    for (int i = 0; i < n_chain; ++i) {
        gibbs_sweep(state, data, priors, config, crng);
        for (std::size_t j = 0; j < m; ++j) {
            data.values[j] = gev_sample(crng, state.components[state.allocations[j]]);
        }
        c_alpha.push_back(state.alpha);
        c_v1.push_back(state.sticks.v[0]);
        c_xi1.push_back(state.components[0].shape());
    }

    const auto compare = [&](const std::vector<double>& f, const std::vector<double>& c,
                             const char* label) {
        const double se_f = sd_of(f) / std::sqrt(static_cast<double>(f.size()));
        const double se_c = batch_se(c);
        const double z = (mean_of(f) - mean_of(c)) / std::sqrt(se_f * se_f + se_c * se_c);
        INFO(label << ": forward " << mean_of(f) << " chain " << mean_of(c) << " z " << z);
        CHECK(std::fabs(z) < 5.0);
    };
    compare(f_alpha, c_alpha, "alpha");
    compare(f_v1, c_v1, "V1");
    compare(f_xi1, c_xi1, "xi1");
}
