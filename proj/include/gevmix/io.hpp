#pragma once

// Run artifacts: the draw log (one row per retained draw and component),
// JSON run manifests, and the flat key = value chain configuration format.
// Doubles are printed with 17 significant digits so files round-trip
// bit-exactly and identical seeds give byte-identical logs.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gevmix/csv.hpp"
#include "gevmix/data.hpp"
#include "gevmix/sampler.hpp"

namespace gevmix {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Draw log
// ---------------------------------------------------------------------------

inline constexpr const char* kDrawLogHeader = "iteration,k,mu,sigma,xi,pi_k,alpha,n_k";

inline std::string draw_log_to_string(const PosteriorDraws& draws) {
    std::string out(kDrawLogHeader);
    out += '\n';
    for (const auto& d : draws.draws) {
        for (std::size_t k = 0; k < d.components.size(); ++k) {
            out += std::to_string(d.iteration);
            out += ',';
            out += std::to_string(k + 1);
            out += ',';
            out += format_double(d.components[k].location());
            out += ',';
            out += format_double(d.components[k].scale());
            out += ',';
            out += format_double(d.components[k].shape());
            out += ',';
            out += format_double(d.sticks.pi[k]);
            out += ',';
            out += format_double(d.alpha);
            out += ',';
            out += std::to_string(d.counts[k]);
            out += '\n';
        }
    }
    return out;
}

inline void write_draw_log(const std::filesystem::path& path, const PosteriorDraws& draws) {
    atomic_write(path, draw_log_to_string(draws));
}

/// Rebuilds retained draws from a log. Stick variables are not logged, so
/// the snapshots carry weights only (everything the diagnostics use).
inline PosteriorDraws read_draw_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || detail::strip(line) != kDrawLogHeader) {
        throw DataError(path.string() + ": not a draw log (bad header)");
    }
    PosteriorDraws out;
    DrawSnapshot current;
    bool open = false;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::strip(line).empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 8) {
            throw DataError(path.string() + ": line " + std::to_string(line_no) +
                            ": expected 8 fields");
        }
        // from_chars-based parsing: stick weights underflow to subnormals,
        // which std::stod rejects with out_of_range
        const auto num = [&](std::size_t i) {
            const auto v = detail::parse_double(fields[i]);
            if (!v) {
                throw DataError(path.string() + ": line " + std::to_string(line_no) +
                                ": bad number '" + detail::strip(fields[i]) + "'");
            }
            return *v;
        };
        const std::size_t iteration = static_cast<std::size_t>(num(0));
        const std::size_t k = static_cast<std::size_t>(num(1));
        const double mu = num(2);
        const double sigma = num(3);
        const double xi = num(4);
        const double pi_k = num(5);
        const double alpha = num(6);
        const std::size_t n_k = static_cast<std::size_t>(num(7));
        if (open && iteration != current.iteration) {
            out.draws.push_back(std::move(current));
            current = DrawSnapshot{};
            open = false;
        }
        if (!open) {
            current.iteration = iteration;
            current.alpha = alpha;
            open = true;
        }
        if (k != current.components.size() + 1) {
            throw DataError(path.string() + ": line " + std::to_string(line_no) +
                            ": components out of order");
        }
        current.components.emplace_back(mu, sigma, xi);
        current.sticks.pi.push_back(pi_k);
        current.counts.push_back(n_k);
    }
    if (open) out.draws.push_back(std::move(current));
    if (out.draws.empty()) {
        throw DataError(path.string() + ": empty draw log");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Block-maxima files
// ---------------------------------------------------------------------------

inline std::string blocks_to_string(const BlockMaximaSeries& data) {
    std::string out = data.group_labels.empty() ? "value" : "value,group";
    out += '\n';
    for (std::size_t i = 0; i < data.values.size(); ++i) {
        out += format_double(data.values[i]);
        if (!data.group_labels.empty()) {
            out += ',';
            out += data.group_labels[i];
        }
        out += '\n';
    }
    return out;
}

inline void write_blocks_csv(const std::filesystem::path& path, const BlockMaximaSeries& data) {
    atomic_write(path, blocks_to_string(data));
}

// ---------------------------------------------------------------------------
// Manifests
// ---------------------------------------------------------------------------

using Manifest = nlohmann::ordered_json;

inline void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
    atomic_write(path, manifest.dump(2) + "\n");
}

inline Manifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    Manifest m;
    try {
        in >> m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": invalid manifest: " + e.what());
    }
    return m;
}

inline Manifest config_to_manifest(const ChainConfig& config) {
    Manifest m;
    m["truncation"] = config.truncation;
    m["n_iter"] = config.n_iter;
    m["burn_in"] = config.effective_burn_in();
    m["thin"] = config.thin;
    m["seed"] = config.seed;
    m["adapt"] = config.adapt;
    if (config.adapt_window) m["adapt_window"] = *config.adapt_window;
    if (config.proposal_scales) {
        m["proposal_scales"] = {{"mu", config.proposal_scales->location},
                                {"logscale", config.proposal_scales->log_scale},
                                {"shape", config.proposal_scales->shape}};
    }
    if (config.censor_delta) m["censor_delta"] = *config.censor_delta;
    return m;
}

inline Manifest priors_to_manifest(const PriorSpec& priors) {
    Manifest m;
    m["mu_prior"] = {{"mean", priors.location.mean}, {"variance", priors.location.variance}};
    m["logscale_prior"] = {{"mean", priors.log_scale.mean},
                           {"variance", priors.log_scale.variance}};
    m["shape_prior"] = {{"mean", priors.shape.mean},
                        {"variance", priors.shape.variance},
                        {"truncated_below", -0.5}};
    m["alpha_prior"] = {{"shape", priors.alpha_shape}, {"rate", priors.alpha_rate}};
    return m;
}

// ---------------------------------------------------------------------------
// Flat key = value configuration files
// ---------------------------------------------------------------------------

/// Parses a chain configuration file. Every ChainConfig and PriorSpec field
/// is addressable; '#' starts a comment; unknown keys are errors. The three
/// proposal-scale keys must be given together.
inline std::pair<ChainConfig, PriorSpec> parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    ChainConfig config;
    PriorSpec priors;
    std::map<std::string, double> scale_keys;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::string stripped = detail::strip(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw DataError(path.string() + ": line " + std::to_string(line_no) +
                            ": expected key = value");
        }
        const std::string key = detail::strip(stripped.substr(0, eq));
        const std::string value = detail::strip(stripped.substr(eq + 1));
        const auto as_double = [&]() {
            const auto v = detail::parse_double(value);
            if (!v) {
                throw DataError(path.string() + ": line " + std::to_string(line_no) +
                                ": bad numeric value '" + value + "'");
            }
            return *v;
        };
        const auto as_size = [&]() {
            const double v = as_double();
            if (v < 0 || v != std::floor(v)) {
                throw DataError(path.string() + ": line " + std::to_string(line_no) +
                                ": expected a nonnegative integer");
            }
            return static_cast<std::size_t>(v);
        };
        const auto as_bool = [&]() {
            if (value == "true" || value == "1") return true;
            if (value == "false" || value == "0") return false;
            throw DataError(path.string() + ": line " + std::to_string(line_no) +
                            ": expected true/false");
        };

        if (key == "truncation") config.truncation = as_size();
        else if (key == "n_iter") config.n_iter = as_size();
        else if (key == "burn_in") config.burn_in = as_size();
        else if (key == "thin") config.thin = as_size();
        else if (key == "seed") config.seed = static_cast<std::uint64_t>(as_size());
        else if (key == "adapt") config.adapt = as_bool();
        else if (key == "adapt_window") config.adapt_window = as_size();
        else if (key == "censor_delta") config.censor_delta = as_double();
        else if (key == "mu_prop_sd" || key == "logscale_prop_sd" || key == "shape_prop_sd")
            scale_keys[key] = as_double();
        else if (key == "mu_prior_mean") priors.location.mean = as_double();
        else if (key == "mu_prior_var") priors.location.variance = as_double();
        else if (key == "logscale_prior_mean") priors.log_scale.mean = as_double();
        else if (key == "logscale_prior_var") priors.log_scale.variance = as_double();
        else if (key == "shape_prior_mean") priors.shape.mean = as_double();
        else if (key == "shape_prior_var") priors.shape.variance = as_double();
        else if (key == "alpha_prior_shape") priors.alpha_shape = as_double();
        else if (key == "alpha_prior_rate") priors.alpha_rate = as_double();
        else {
            throw DataError(path.string() + ": line " + std::to_string(line_no) +
                            ": unknown key '" + key + "'");
        }
    }
    if (!scale_keys.empty()) {
        if (scale_keys.size() != 3) {
            throw DataError(path.string() +
                            ": set mu_prop_sd, logscale_prop_sd and shape_prop_sd together");
        }
        config.proposal_scales = ProposalScales{scale_keys["mu_prop_sd"],
                                                scale_keys["logscale_prop_sd"],
                                                scale_keys["shape_prop_sd"]};
    }
    return {config, priors};
}

}  // namespace gevmix
