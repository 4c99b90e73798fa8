//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file perpsim/harness.hpp
//! \brief Scenario configuration, replication driver and CSV output
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "estimators.hpp"
#include "model.hpp"
#include "stats.hpp"

namespace perpsim
{
//---------------------------------------------------------------------------//
enum class EstimatorKind
{
    crude,
    naive,
    si,
    sd
};

char const* to_string(EstimatorKind e) noexcept;

//---------------------------------------------------------------------------//
/*!
 * One block of a configuration file.
 *
 * For model=arch1 the scale is the ARCH level: the event is X^2 > alpha1 /
 * delta, i.e. D > 1/(delta/alpha1). Set raw_level to use delta directly.
 */
struct Scenario
{
    std::string name;
    std::string model = "arch1";  //!< arch1 | two_state | normal | custom

    double alpha0 = 1;
    double alpha1 = 0.75;
    double mean = -1;  //!< normal model increment mean
    double stddev = 1;
    double reward = 1;
    std::optional<ModelDefinition> custom;

    EstimatorKind estimator = EstimatorKind::si;
    std::optional<double> delta;
    std::vector<double> deltas;  //!< slope grid
    std::optional<std::uint64_t> reps;
    std::optional<double> budget_ms;
    std::uint64_t seed = 0;

    std::optional<double> a;
    std::optional<std::uint64_t> n_star;
    std::optional<std::uint64_t> step_cap;
    bool raw_level = false;
    bool enforce_budget = true;
    bool demo = false;

    std::size_t line = 0;  //!< first line of the block
};

// Throws ConfigError ("line N: ...") on syntax or validation failure
std::vector<Scenario> parse_config(std::string_view text);
std::vector<Scenario> load_config(std::string const& path);

// Text form accepted by parse_config
std::string to_config_text(std::vector<Scenario> const& scenarios);

Model build_model(Scenario const& sc);

// Scale passed to the samplers after the ARCH level mapping
double sampler_delta(Scenario const& sc, double delta);

SamplerConfig sampler_config(Scenario const& sc, Model const& model,
                             double delta);

//---------------------------------------------------------------------------//
struct RunOptions
{
    unsigned workers = 1;
    bool record_time = true;  //!< false writes wall_ms as NA
    std::optional<std::uint64_t> seed_override;
};

struct ScenarioResult
{
    std::string scenario;
    std::string model;
    std::string estimator;
    double delta = 0;
    std::uint64_t seed = 0;
    SummaryStats stats;
    std::optional<double> wall_ms;
    std::string metadata;  //!< JSON object
};

// Replications are grouped into fixed chunks whose results are merged in
// chunk order, so reps-mode output does not depend on the worker count.
ScenarioResult run_scenario(Scenario const& sc, RunOptions const& opts);

// Same as run_scenario at an explicit delta
ScenarioResult
run_scenario_at(Scenario const& sc, double delta, RunOptions const& opts);

//---------------------------------------------------------------------------//
std::string format_double(double v);
std::string csv_header();
std::string csv_row(ScenarioResult const& r);
std::string format_csv(std::vector<ScenarioResult> const& rows);
void emit_csv(std::string const& path,
              std::vector<ScenarioResult> const& rows);

//---------------------------------------------------------------------------//
struct SlopeResult
{
    double slope = 0;
    double std_err = 0;
    double theta_star = 0;
    std::vector<ScenarioResult> points;
};

// Weighted least squares of log phi_hat on log delta using the SI sampler
SlopeResult slope_check(Scenario const& sc, RunOptions const& opts);

//---------------------------------------------------------------------------//
// Scenario grid of the published numerical tables
std::vector<Scenario> appendix_scenarios(std::uint64_t reps);

}  // namespace perpsim
