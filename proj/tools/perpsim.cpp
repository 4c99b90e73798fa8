//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file perpsim.cpp
//! \brief Command line front end; talks to the library only through its C API
//---------------------------------------------------------------------------//
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "perpsim/perpsim.h"

namespace
{
//---------------------------------------------------------------------------//
// Map library status onto the documented exit codes
int exit_code(perpsim_status s)
{
    switch (s)
    {
        case PERPSIM_OK:
        case PERPSIM_ERR_CONFIG:
        case PERPSIM_ERR_LYAPUNOV:
        case PERPSIM_ERR_NUMERIC:
            return static_cast<int>(s);
        default:
            return 1;
    }
}

int report(perpsim_status s)
{
    std::cerr << "perpsim: " << perpsim_last_error() << '\n';
    if (s == PERPSIM_ERR_LYAPUNOV)
    {
        double budget = 0, largest = 0;
        perpsim_last_refusal(&budget, &largest);
        std::cerr << "perpsim: largest admissible delta " << largest << '\n';
    }
    return exit_code(s);
}

struct ConfigHandle
{
    perpsim_config* ptr = nullptr;
    ~ConfigHandle() { perpsim_config_free(ptr); }
};

struct ResultsHandle
{
    perpsim_results* ptr = nullptr;
    ~ResultsHandle() { perpsim_results_free(ptr); }
};

// Reads PERPSIM_SEED; returns false if it is set but malformed
bool seed_from_env(perpsim_run_options& opts)
{
    char const* env = std::getenv("PERPSIM_SEED");
    if (!env || !*env)
    {
        return true;
    }
    char* end = nullptr;
    errno = 0;
    unsigned long long const v = std::strtoull(env, &end, 10);
    if (errno != 0 || *end != '\0' || *env == '-')
    {
        std::cerr << "perpsim: PERPSIM_SEED must be an unsigned integer\n";
        return false;
    }
    opts.has_seed_override = 1;
    opts.seed_override = v;
    return true;
}

bool write_text(std::string const& path, std::string const& text)
{
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f)
    {
        std::cerr << "perpsim: cannot write '" << path << "'\n";
        return false;
    }
    return true;
}

std::string metadata_array(perpsim_results const* res)
{
    std::string out = "[\n";
    std::size_t const n = perpsim_results_size(res);
    for (std::size_t i = 0; i < n; ++i)
    {
        out += "  ";
        out += perpsim_results_metadata(res, i);
        out += i + 1 < n ? ",\n" : "\n";
    }
    return out + "]\n";
}

//---------------------------------------------------------------------------//
int cmd_run(std::string const& config,
            perpsim_run_options opts,
            std::string const& out)
{
    ConfigHandle cfg;
    if (auto s = perpsim_config_load(config.c_str(), &cfg.ptr))
        return report(s);
    ResultsHandle res;
    if (auto s = perpsim_run(cfg.ptr, &opts, &res.ptr))
        return report(s);
    if (out.empty())
    {
        std::cout << perpsim_results_csv(res.ptr);
        return 0;
    }
    if (auto s = perpsim_results_write_csv(res.ptr, out.c_str()))
        return report(s);
    return write_text(out + ".meta.json", metadata_array(res.ptr)) ? 0 : 1;
}

int cmd_theta_star(std::string const& config)
{
    ConfigHandle cfg;
    if (auto s = perpsim_config_load(config.c_str(), &cfg.ptr))
        return report(s);
    std::printf("scenario,theta_star,psi_at_root,mu,largest_sd_delta,u_star\n");
    for (std::size_t i = 0; i < perpsim_config_size(cfg.ptr); ++i)
    {
        perpsim_tilt_info info{};
        if (auto s = perpsim_theta_star(cfg.ptr, i, &info))
            return report(s);
        std::vector<double> u(info.num_states);
        std::size_t count = 0;
        if (auto s = perpsim_eigvec(cfg.ptr, i, u.data(), u.size(), &count))
            return report(s);
        std::printf("%s,%.12g,%.3g,%.12g,%.6g,",
                    perpsim_config_name(cfg.ptr, i),
                    info.theta_star,
                    info.psi_at_root,
                    info.mu,
                    info.largest_admissible_delta);
        for (std::size_t k = 0; k < count; ++k)
        {
            std::printf("%s%.12g", k ? ";" : "", u[k]);
        }
        std::printf("\n");
    }
    return 0;
}

int cmd_slope(std::string const& config,
              perpsim_run_options opts,
              std::string const& out)
{
    ConfigHandle cfg;
    if (auto s = perpsim_config_load(config.c_str(), &cfg.ptr))
        return report(s);
    std::string points_csv;
    std::printf("scenario,slope,std_err,theta_star,rel_diff\n");
    for (std::size_t i = 0; i < perpsim_config_size(cfg.ptr); ++i)
    {
        perpsim_slope_info info{};
        ResultsHandle pts;
        if (auto s = perpsim_slope(cfg.ptr, i, &opts, &info, &pts.ptr))
            return report(s);
        std::printf("%s,%.6g,%.3g,%.6g,%.3g\n",
                    perpsim_config_name(cfg.ptr, i),
                    info.slope,
                    info.std_err,
                    info.theta_star,
                    (info.slope - info.theta_star) / info.theta_star);
        std::string text = perpsim_results_csv(pts.ptr);
        points_csv += points_csv.empty() ? text
                                         : text.substr(text.find('\n') + 1);
    }
    if (!out.empty() && !write_text(out, points_csv))
    {
        return 1;
    }
    return 0;
}

int cmd_verify(std::string const& config,
               std::size_t probes,
               std::uint64_t samples)
{
    ConfigHandle cfg;
    if (auto s = perpsim_config_load(config.c_str(), &cfg.ptr))
        return report(s);
    std::printf("scenario,probes,passed,worst_ratio,worst_std_err,budget,"
                "guaranteed\n");
    for (std::size_t i = 0; i < perpsim_config_size(cfg.ptr); ++i)
    {
        perpsim_drift_report rep{};
        if (auto s
            = perpsim_verify_lyapunov(cfg.ptr, i, probes, samples, &rep))
            return report(s);
        std::printf("%s,%zu,%zu,%.6g,%.3g,%.6g,%s\n",
                    perpsim_config_name(cfg.ptr, i),
                    rep.probes,
                    rep.passed,
                    rep.worst_ratio,
                    rep.worst_std_err,
                    rep.budget,
                    rep.guaranteed ? "true" : "false");
    }
    return 0;
}

int cmd_appendix(std::string const& dir,
                 std::uint64_t reps,
                 perpsim_run_options opts)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
    {
        std::cerr << "perpsim: cannot create '" << dir << "': "
                  << ec.message() << '\n';
        return 1;
    }
    ConfigHandle cfg;
    if (auto s = perpsim_config_appendix(reps, &cfg.ptr))
        return report(s);
    std::string const base = (std::filesystem::path(dir) / "appendix").string();
    if (auto s = perpsim_config_write(cfg.ptr, (base + ".conf").c_str()))
        return report(s);
    ResultsHandle res;
    if (auto s = perpsim_run(cfg.ptr, &opts, &res.ptr))
        return report(s);
    if (auto s = perpsim_results_write_csv(res.ptr, (base + ".csv").c_str()))
        return report(s);
    return write_text(base + ".csv.meta.json", metadata_array(res.ptr)) ? 0
                                                                        : 1;
}
}  // namespace

//---------------------------------------------------------------------------//
int main(int argc, char** argv)
{
    CLI::App app{"Rare-event simulation of Markov-modulated perpetuity tails"};
    app.require_subcommand(1);
    app.set_version_flag("--version", perpsim_version());

    std::string config, out;
    unsigned workers = 1;
    bool no_timing = false;
    std::size_t probes = 100;
    std::uint64_t samples = 100000;
    std::uint64_t reps = 10000;

    auto* run = app.add_subcommand("run", "Run every scenario, emit CSV");
    run->add_option("--config", config, "Scenario file")->required();
    run->add_option("--workers", workers, "Worker threads")
        ->check(CLI::PositiveNumber);
    run->add_option("--out", out, "CSV path (default: stdout)");
    run->add_flag("--no-timing", no_timing, "Write wall_ms as NA");

    auto* theta = app.add_subcommand("theta-star", "Cramer root per scenario");
    theta->add_option("--config", config, "Scenario file")->required();

    auto* slope = app.add_subcommand("slope", "Fit log phi against log delta");
    slope->add_option("--config", config, "Scenario file")->required();
    slope->add_option("--workers", workers, "Worker threads")
        ->check(CLI::PositiveNumber);
    slope->add_option("--out", out, "CSV of the fitted points");

    auto* verify = app.add_subcommand("verify-lyapunov",
                                      "Monte Carlo drift check at random "
                                      "points of the tilt region");
    verify->add_option("--config", config, "Scenario file")->required();
    verify->add_option("--probes", probes, "Number of probes")
        ->required()
        ->check(CLI::PositiveNumber);
    verify->add_option("--samples", samples, "Samples per probe (>= 1e5)");

    auto* appendix = app.add_subcommand("reproduce-appendix",
                                        "Run the published scenario grid");
    appendix->add_option("--out", out, "Output directory")->required();
    appendix->add_option("--reps", reps, "Replications per row")
        ->check(CLI::PositiveNumber);
    appendix->add_option("--workers", workers, "Worker threads")
        ->check(CLI::PositiveNumber);
    appendix->add_flag("--no-timing", no_timing, "Write wall_ms as NA");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const rc = app.exit(e);
        return rc == 0 ? 0 : PERPSIM_ERR_CONFIG;
    }

    perpsim_run_options opts = perpsim_default_run_options();
    opts.workers = workers;
    opts.record_time = no_timing ? 0 : 1;
    if (!seed_from_env(opts))
    {
        return PERPSIM_ERR_CONFIG;
    }

    if (*run)
        return cmd_run(config, opts, out);
    if (*theta)
        return cmd_theta_star(config);
    if (*slope)
        return cmd_slope(config, opts, out);
    if (*verify)
        return cmd_verify(config, probes, samples);
    return cmd_appendix(out, reps, opts);
}
