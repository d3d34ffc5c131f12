// gevmix command-line interface: simulate benchmark datasets, fit the
// Dirichlet-process GEV mixture by blocked Gibbs sampling, emit diagnostic
// curve files, and run replicated Monte Carlo studies.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
// On failure the first stderr line is machine-parseable JSON
// (error: {"kind":..., "message":...}), followed by a human-readable line.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gevmix/blocking.hpp"
#include "gevmix/csv.hpp"
#include "gevmix/diagnostics.hpp"
#include "gevmix/io.hpp"
#include "gevmix/sampler.hpp"
#include "gevmix/simdata.hpp"

namespace fs = std::filesystem;
using namespace gevmix;

namespace {

void emit_error(const std::string& kind, const std::string& message) {
    nlohmann::ordered_json j{{"kind", kind}, {"message", message}};
    std::cerr << "error: " << j.dump() << "\n";
    std::cerr << kind << " error: " << message << "\n";
}

std::vector<double> parse_double_list(const std::string& csv, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto v = detail::parse_double(tok);
        if (!v) {
            throw CLI::ValidationError(what, "bad number '" + tok + "'");
        }
        out.push_back(*v);
    }
    if (out.empty()) {
        throw CLI::ValidationError(what, "empty list");
    }
    return out;
}

std::string curve_to_csv(const CurveSummary& curve) {
    std::string out = "grid,median,lower,upper\n";
    for (std::size_t j = 0; j < curve.grid.size(); ++j) {
        out += format_double(curve.grid[j]) + "," + format_double(curve.median[j]) + "," +
               format_double(curve.lower[j]) + "," + format_double(curve.upper[j]) + "\n";
    }
    return out;
}

std::string return_levels_to_csv(const ReturnLevelCurve& rl) {
    std::string out = "p,x_axis,median,lower,upper\n";
    for (std::size_t j = 0; j < rl.p.size(); ++j) {
        out += format_double(rl.p[j]) + "," + format_double(rl.x_axis[j]) + "," +
               format_double(rl.median[j]) + "," + format_double(rl.lower[j]) + "," +
               format_double(rl.upper[j]) + "\n";
    }
    return out;
}

Manifest scenario_to_manifest(const ScenarioSpec& spec) {
    Manifest components = Manifest::array();
    for (const auto& c : spec.components) {
        Manifest entry;
        entry["weight"] = c.weight;
        if (const auto* g = std::get_if<GevParams>(&c.dist)) {
            entry["family"] = "gev";
            entry["mu"] = g->location();
            entry["sigma"] = g->scale();
            entry["xi"] = g->shape();
        } else if (const auto* n = std::get_if<NormalParams>(&c.dist)) {
            entry["family"] = "normal";
            entry["mean"] = n->mean;
            entry["sd"] = n->sd;
        } else {
            entry["family"] = "student_t";
            entry["dof"] = std::get<StudentTParams>(c.dist).dof;
        }
        components.push_back(entry);
    }
    Manifest m;
    m["tag"] = to_string(spec.tag);
    m["sample_size"] = spec.sample_size;
    m["components"] = components;
    return m;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
    std::string scenario;
    std::size_t n = 1000;
    std::size_t blocks = 50;
    std::size_t block_size = 1000;
    std::string rates = "1,2";
    std::string weights = "0.5,0.5";
    std::uint64_t seed = 1;
    std::string out;
};

int run_simulate(const SimulateOptions& opt) {
    RngStream rng(opt.seed);
    BlockMaximaSeries data;
    Manifest truth;
    if (opt.scenario == "exp-blocks") {
        const auto rates = parse_double_list(opt.rates, "--rates");
        const auto weights = parse_double_list(opt.weights, "--weights");
        data = gen_exponential_block_maxima(opt.blocks, opt.block_size, rates, weights, rng);
        truth["kind"] = "exp-blocks";
        truth["blocks"] = opt.blocks;
        truth["block_size"] = opt.block_size;
        truth["rates"] = rates;
        truth["weights"] = weights;
        if (rates.size() == 2 && rates[0] == 1.0 && rates[1] == 2.0) {
            const GevMixture limit = eq6_limit_mixture(opt.block_size);
            truth["limit_mixture"] = {
                {"components",
                 {{{"mu", limit.components[0].location()},
                   {"sigma", limit.components[0].scale()},
                   {"xi", 0.0}},
                  {{"mu", limit.components[1].location()},
                   {"sigma", limit.components[1].scale()},
                   {"xi", 0.0}}}},
                {"weights", limit.weights.pi}};
        }
    } else {
        const ScenarioSpec spec =
            ScenarioSpec::make(scenario_tag_from_string(opt.scenario), opt.n);
        data = gen_scenario(spec, rng);
        truth["kind"] = "scenario";
        truth["scenario"] = scenario_to_manifest(spec);
    }
    truth["seed"] = opt.seed;
    truth["observations"] = data.values.size();

    const fs::path out_path(opt.out);
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    write_blocks_csv(out_path, data);
    write_manifest(out_path.string() + ".manifest.json", truth);
    std::cout << "wrote " << data.values.size() << " observations to " << opt.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitOptions {
    std::string data_path;
    bool seasonal = false;
    std::string date_column = "date";
    std::string value_column = "value";
    std::string missing_token = "NA";
    bool permissive = false;
    std::size_t min_days = kDefaultMinDays;
    bool min_days_given = false;
    std::string config_path;
    std::string out_dir;
    // chain overrides, applied only when the flag was passed
    std::size_t truncation = 50;
    std::size_t iters = 30000;
    std::size_t burn_in = 0;
    std::size_t thin = 1;
    std::uint64_t seed = 1;
    double censor_delta = 0.0;
    bool no_adapt = false;
};

void apply_chain_overrides(const CLI::App* cmd, const FitOptions& opt, ChainConfig& config) {
    if (cmd->count("--truncation") > 0) config.truncation = opt.truncation;
    if (cmd->count("--iters") > 0) config.n_iter = opt.iters;
    if (cmd->count("--burn-in") > 0) config.burn_in = opt.burn_in;
    if (cmd->count("--thin") > 0) config.thin = opt.thin;
    if (cmd->count("--seed") > 0) config.seed = opt.seed;
    if (cmd->count("--censor-delta") > 0) config.censor_delta = opt.censor_delta;
    if (cmd->count("--no-adapt") > 0) config.adapt = false;
}

int run_fit(const CLI::App* cmd, const FitOptions& opt) {
    ChainConfig config;
    PriorSpec priors;
    if (!opt.config_path.empty()) {
        std::tie(config, priors) = parse_config_file(opt.config_path);
    }
    apply_chain_overrides(cmd, opt, config);
    config.validate();
    priors.validate();

    BlockMaximaSeries data;
    Manifest data_manifest;
    data_manifest["source"] = opt.data_path;
    std::vector<SeasonBlock> season_blocks;
    if (opt.seasonal) {
        CsvSchema schema;
        schema.date_column = opt.date_column;
        schema.value_column = opt.value_column;
        schema.missing_token = opt.missing_token;
        schema.strict = !opt.permissive;
        const IngestReport report = ingest_csv(opt.data_path, schema);
        season_blocks = seasonal_block_maxima(report.records, opt.min_days, opt.min_days_given);
        data = to_series(season_blocks);
        data_manifest["mode"] = "seasonal";
        data_manifest["daily_records"] = report.records.size();
        data_manifest["malformed_rows"] = report.row_errors.size();
        data_manifest["min_days"] = opt.min_days;
        data_manifest["drop_underfilled"] = opt.min_days_given;
    } else {
        data = read_block_maxima_csv(opt.data_path, opt.missing_token);
        data_manifest["mode"] = "blocks";
    }
    data_manifest["observations"] = data.values.size();
    data.validate();

    RngStream rng(config.seed);
    const PosteriorDraws draws = run_chain(data, priors, config, rng);

    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    write_blocks_csv(dir / "blocks.csv", data);
    if (opt.seasonal) {
        std::string csv = "season,year,maximum,count,flagged\n";
        for (const auto& b : season_blocks) {
            csv += std::string(to_string(b.season)) + "," + std::to_string(b.year_key) + "," +
                   format_double(b.maximum) + "," + std::to_string(b.count) + "," +
                   (b.flagged ? "1" : "0") + "\n";
        }
        atomic_write(dir / "seasonal_blocks.csv", csv);
    }
    write_draw_log(dir / "draws.csv", draws);

    Manifest manifest;
    manifest["command"] = "fit";
    manifest["data"] = data_manifest;
    manifest["config"] = config_to_manifest(config);
    manifest["priors"] = priors_to_manifest(priors);
    manifest["results"] = {
        {"retained_draws", draws.size()},
        {"acceptance_rate", draws.component_acceptance.rate()},
        {"acceptance_rate_post_burnin", draws.retained_acceptance.rate()},
        {"final_scale_multiplier", draws.final_scale_multiplier}};
    write_manifest(dir / "manifest.json", manifest);
    std::cout << "fitted " << data.values.size() << " block maxima; retained " << draws.size()
              << " draws in " << opt.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// diagnose
// ---------------------------------------------------------------------------

struct DiagnoseOptions {
    std::string run_dir;
    std::string grid;  // "min,max[,points]"
    std::size_t grid_points = 512;
    double grid_min = 0.0;
    double grid_max = 0.0;
    bool grid_range_given = false;
    std::string p_grid = "0.5,0.2,0.1,0.05,0.02,0.01";
    double level = 0.95;
    std::size_t rl_subsample = 100;
    std::size_t curve_subsample = 500;
};

int run_diagnose(DiagnoseOptions opt) {
    const fs::path dir(opt.run_dir);
    const PosteriorDraws draws = read_draw_log(dir / "draws.csv");
    const BlockMaximaSeries data = read_block_maxima_csv(dir / "blocks.csv");

    if (!opt.grid.empty()) {
        const auto parts = parse_double_list(opt.grid, "--grid");
        if (parts.size() != 2 && parts.size() != 3) {
            throw CLI::ValidationError("--grid", "expected min,max[,points]");
        }
        opt.grid_min = parts[0];
        opt.grid_max = parts[1];
        if (parts.size() == 3) opt.grid_points = static_cast<std::size_t>(parts[2]);
        opt.grid_range_given = true;
    }
    std::vector<double> grid;
    if (opt.grid_range_given) {
        if (!(opt.grid_max > opt.grid_min) || opt.grid_points < 2) {
            throw std::invalid_argument("diagnose: bad grid range");
        }
        grid.resize(opt.grid_points);
        for (std::size_t i = 0; i < opt.grid_points; ++i) {
            grid[i] = opt.grid_min + (opt.grid_max - opt.grid_min) * static_cast<double>(i) /
                                         static_cast<double>(opt.grid_points - 1);
        }
    } else {
        grid = default_grid(data.values, opt.grid_points);
    }

    const PosteriorCurves curves = posterior_curves(draws, grid, opt.level, opt.curve_subsample);
    atomic_write(dir / "density.csv", curve_to_csv(curves.density));
    atomic_write(dir / "cdf.csv", curve_to_csv(curves.cdf));

    const std::vector<double> p_grid = parse_double_list(opt.p_grid, "--p-grid");
    const ReturnLevelCurve rl = return_levels(draws, p_grid, opt.level, opt.rl_subsample);
    atomic_write(dir / "return_levels.csv", return_levels_to_csv(rl));

    // Dunn-Smyth residuals against the pointwise posterior-median CDF,
    // evaluated exactly at the data points.
    const auto idx = detail::subsample_indices(draws.size(), opt.curve_subsample);
    std::vector<GevMixture> mixes;
    mixes.reserve(idx.size());
    for (std::size_t d : idx) mixes.push_back(draws.draws[d].mixture());
    const auto median_cdf = [&](double z) {
        std::vector<double> vals(mixes.size());
        for (std::size_t d = 0; d < mixes.size(); ++d) vals[d] = mixture_cdf(z, mixes[d]);
        return detail::sample_quantile(std::move(vals), 0.5);
    };
    const std::vector<double> residuals = dunn_smyth_residuals(median_cdf, data.values);
    std::string res_csv = "index,observation,fhat,residual\n";
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        res_csv += std::to_string(i + 1) + "," + format_double(data.values[i]) + "," +
                   format_double(median_cdf(data.values[i])) + "," +
                   format_double(residuals[i]) + "\n";
    }
    atomic_write(dir / "residuals.csv", res_csv);

    // ordered residuals against normal plotting positions, for QQ displays
    std::string qq_csv = "theoretical,sample\n";
    for (const auto& [theoretical, sample] : qq_pairs(residuals)) {
        qq_csv += format_double(theoretical) + "," + format_double(sample) + "\n";
    }
    atomic_write(dir / "qq.csv", qq_csv);

    const auto hist = occupied_histogram(draws);
    std::string occ_csv = "occupied,draws,fraction\n";
    for (const auto& [count, freq] : hist) {
        occ_csv += std::to_string(count) + "," + std::to_string(freq) + "," +
                   format_double(static_cast<double>(freq) / static_cast<double>(draws.size())) +
                   "\n";
    }
    atomic_write(dir / "occupied.csv", occ_csv);

    std::cout << "diagnostics for " << draws.size() << " draws written to " << opt.run_dir
              << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// study
// ---------------------------------------------------------------------------

struct StudyOptionsCli {
    std::string scenario;
    std::size_t replicates = 0;
    std::size_t n = 1000;
    std::size_t workers = 1;
    std::string p_grid = "0.05,0.01";
    std::string out_dir;
    std::size_t curve_subsample = 200;
    std::size_t rl_subsample = 100;
};

int run_study(const CLI::App* cmd, const StudyOptionsCli& opt, const FitOptions& chain_opt) {
    ChainConfig config;
    PriorSpec priors;
    if (!chain_opt.config_path.empty()) {
        std::tie(config, priors) = parse_config_file(chain_opt.config_path);
    }
    apply_chain_overrides(cmd, chain_opt, config);
    config.validate();
    priors.validate();

    const ScenarioSpec spec = ScenarioSpec::make(scenario_tag_from_string(opt.scenario), opt.n);
    StudyOptions study_options;
    study_options.p_grid = parse_double_list(opt.p_grid, "--p-grid");
    study_options.curve_subsample = opt.curve_subsample;
    study_options.rl_subsample = opt.rl_subsample;
    study_options.workers = opt.workers;

    const auto results = monte_carlo_study(spec, opt.replicates, priors, config, study_options);

    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);

    std::string rep_csv =
        "replicate,seed,ise,q95_lower,q95_median,q95_upper,modal_occupied,modal_fraction\n";
    std::string rl_csv = "replicate,p,x_axis,lower,median,upper\n";
    Manifest rep_manifests = Manifest::array();
    for (const auto& r : results) {
        rep_csv += std::to_string(r.replicate) + "," + std::to_string(r.seed) + "," +
                   format_double(r.ise) + "," + format_double(r.q95_lower) + "," +
                   format_double(r.q95_median) + "," + format_double(r.q95_upper) + "," +
                   std::to_string(r.modal_occupied) + "," + format_double(r.modal_fraction) +
                   "\n";
        for (std::size_t j = 0; j < r.return_level.p.size(); ++j) {
            rl_csv += std::to_string(r.replicate) + "," + format_double(r.return_level.p[j]) +
                      "," + format_double(r.return_level.x_axis[j]) + "," +
                      format_double(r.return_level.lower[j]) + "," +
                      format_double(r.return_level.median[j]) + "," +
                      format_double(r.return_level.upper[j]) + "\n";
        }
        Manifest rm;
        rm["replicate"] = r.replicate;
        rm["seed"] = r.seed;
        Manifest hist = Manifest::object();
        for (const auto& [count, freq] : r.occupied_hist) {
            hist[std::to_string(count)] = freq;
        }
        rm["occupied_histogram"] = hist;
        rep_manifests.push_back(rm);
    }
    atomic_write(dir / "replicates.csv", rep_csv);
    atomic_write(dir / "return_levels.csv", rl_csv);

    Manifest manifest;
    manifest["command"] = "study";
    manifest["scenario"] = scenario_to_manifest(spec);
    manifest["replicates"] = opt.replicates;
    manifest["workers"] = opt.workers;
    manifest["config"] = config_to_manifest(config);
    manifest["priors"] = priors_to_manifest(priors);
    manifest["per_replicate"] = rep_manifests;
    write_manifest(dir / "manifest.json", manifest);

    std::cout << "study of " << opt.replicates << " replicates written to " << opt.out_dir
              << "\n";
    return 0;
}

void add_chain_flags(CLI::App* cmd, FitOptions& opt) {
    cmd->add_option("--config", opt.config_path, "chain configuration file (key = value)");
    cmd->add_option("--truncation,-k", opt.truncation, "truncation level K");
    cmd->add_option("--iters", opt.iters, "total Gibbs iterations");
    cmd->add_option("--burn-in", opt.burn_in, "burn-in iterations (default: half)");
    cmd->add_option("--thin", opt.thin, "retain every thin-th post-burn-in draw");
    cmd->add_option("--seed", opt.seed, "chain seed");
    cmd->add_option("--censor-delta", opt.censor_delta,
                    "interval-censoring half-width (activates censored likelihood)");
    cmd->add_flag("--no-adapt", opt.no_adapt, "disable proposal-scale adaptation");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dirichlet-process mixtures of extreme value distributions"};
    app.require_subcommand(1);

    SimulateOptions sim;
    CLI::App* simulate = app.add_subcommand("simulate", "generate a benchmark dataset");
    simulate->add_option("--scenario", sim.scenario, "A, B, C, or exp-blocks")->required();
    simulate->add_option("--n", sim.n, "sample size (scenario mode)");
    simulate->add_option("--blocks", sim.blocks, "number of blocks (exp-blocks mode)");
    simulate->add_option("--block-size", sim.block_size, "block size (exp-blocks mode)");
    simulate->add_option("--rates", sim.rates, "exponential rates, comma-separated");
    simulate->add_option("--weights", sim.weights, "group weights, comma-separated");
    simulate->add_option("--seed", sim.seed, "generator seed");
    simulate->add_option("--out", sim.out, "output CSV path")->required();

    FitOptions fit;
    CLI::App* fit_cmd = app.add_subcommand("fit", "fit the mixture to block maxima");
    fit_cmd->add_option("--data", fit.data_path, "input CSV")->required();
    fit_cmd->add_flag("--seasonal", fit.seasonal,
                      "input is a daily series; build seasonal block maxima");
    fit_cmd->add_option("--date-column", fit.date_column, "date column name (seasonal mode)");
    fit_cmd->add_option("--value-column", fit.value_column, "value column name (seasonal mode)");
    fit_cmd->add_option("--missing", fit.missing_token, "missing-value token (default NA)");
    fit_cmd->add_flag("--permissive", fit.permissive, "skip malformed rows instead of failing");
    fit_cmd
        ->add_option("--min-days", fit.min_days,
                     "drop season blocks with fewer non-missing days")
        ->check(CLI::PositiveNumber);
    add_chain_flags(fit_cmd, fit);
    fit_cmd->add_option("--out-dir", fit.out_dir, "run directory to create")->required();

    DiagnoseOptions diag;
    CLI::App* diagnose = app.add_subcommand("diagnose", "posterior curves and residuals");
    diagnose->add_option("--run", diag.run_dir, "run directory from fit")->required();
    diagnose->add_option("--grid", diag.grid, "evaluation grid as min,max[,points]");
    diagnose->add_option("--grid-points", diag.grid_points, "evaluation grid size");
    diagnose->add_option("--grid-min", diag.grid_min, "grid lower end");
    diagnose->add_option("--grid-max", diag.grid_max, "grid upper end");
    diagnose->add_option("--p-grid", diag.p_grid, "exceedance probabilities, comma-separated");
    diagnose->add_option("--level", diag.level, "credible level")->check(CLI::Range(0.5, 0.999));
    diagnose->add_option("--rl-subsample", diag.rl_subsample,
                         "draws used for return levels (0 = all)");
    diagnose->add_option("--curve-subsample", diag.curve_subsample,
                         "draws used for curves and residuals (0 = all)");

    StudyOptionsCli study;
    FitOptions study_chain;
    CLI::App* study_cmd = app.add_subcommand("study", "replicated Monte Carlo experiments");
    study_cmd->add_option("--scenario", study.scenario, "A, B, or C")->required();
    study_cmd->add_option("--replicates", study.replicates, "number of replicates")
        ->required()
        ->check(CLI::PositiveNumber);
    study_cmd->add_option("--n", study.n, "sample size per replicate");
    study_cmd->add_option("--workers", study.workers, "concurrent replicate workers")
        ->check(CLI::PositiveNumber);
    study_cmd->add_option("--p-grid", study.p_grid, "exceedance probabilities");
    study_cmd->add_option("--curve-subsample", study.curve_subsample,
                          "draws per replicate for density summaries (0 = all)");
    study_cmd->add_option("--rl-subsample", study.rl_subsample,
                          "draws per replicate for return levels (0 = all)");
    add_chain_flags(study_cmd, study_chain);
    study_cmd->add_option("--out-dir", study.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help
        }
        emit_error("usage", e.what());
        return 2;
    }

    try {
        if (simulate->parsed()) return run_simulate(sim);
        if (fit_cmd->parsed()) {
            fit.min_days_given = fit_cmd->count("--min-days") > 0;
            return run_fit(fit_cmd, fit);
        }
        if (diagnose->parsed()) {
            diag.grid_range_given =
                diagnose->count("--grid-min") > 0 && diagnose->count("--grid-max") > 0;
            return run_diagnose(diag);
        }
        if (study_cmd->parsed()) {
            return run_study(study_cmd, study, study_chain);
        }
    } catch (const CLI::ValidationError& e) {
        emit_error("usage", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        emit_error("usage", e.what());
        return 2;
    } catch (const DataError& e) {
        emit_error("data", e.what());
        return 3;
    } catch (const QuantileError& e) {
        emit_error("numerical", e.what());
        return 4;
    } catch (const std::exception& e) {
        emit_error("numerical", e.what());
        return 4;
    }
    return 0;
}
