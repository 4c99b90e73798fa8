//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file capi.cpp
//! \brief extern "C" wrapper; no exception crosses this boundary
//---------------------------------------------------------------------------//
#include "perpsim/perpsim.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "perpsim/error.hpp"
#include "perpsim/harness.hpp"
#include "perpsim/lyapunov.hpp"
#include "perpsim/spectral.hpp"

struct perpsim_config
{
    std::vector<perpsim::Scenario> scenarios;
};

struct perpsim_results
{
    std::vector<perpsim::ScenarioResult> rows;
    std::string csv;
};

namespace
{
thread_local std::string g_last_error;
thread_local double g_refusal_budget = 0;
thread_local double g_refusal_largest = 0;

perpsim_status fail(perpsim_status s, char const* msg)
{
    g_last_error = msg;
    return s;
}

// Run f, translating exceptions into status codes
template<class F>
perpsim_status guarded(F&& f) noexcept
{
    try
    {
        g_last_error.clear();
        f();
        return PERPSIM_OK;
    }
    catch (perpsim::LyapunovRefusal const& e)
    {
        g_refusal_budget = e.budget();
        g_refusal_largest = e.largest_admissible_delta();
        return fail(PERPSIM_ERR_LYAPUNOV, e.what());
    }
    catch (perpsim::ConfigError const& e)
    {
        return fail(PERPSIM_ERR_CONFIG, e.what());
    }
    catch (perpsim::InvalidArgument const& e)
    {
        return fail(PERPSIM_ERR_CONFIG, e.what());
    }
    catch (perpsim::DomainError const& e)
    {
        return fail(PERPSIM_ERR_NUMERIC, e.what());
    }
    catch (perpsim::NumericError const& e)
    {
        return fail(PERPSIM_ERR_NUMERIC, e.what());
    }
    catch (perpsim::IoError const& e)
    {
        return fail(PERPSIM_ERR_IO, e.what());
    }
    catch (std::exception const& e)
    {
        return fail(PERPSIM_ERR_INTERNAL, e.what());
    }
    catch (...)
    {
        return fail(PERPSIM_ERR_INTERNAL, "unknown exception");
    }
}

void require(bool cond, char const* msg)
{
    if (!cond)
    {
        throw perpsim::InvalidArgument(msg);
    }
}

perpsim::Scenario const& scenario_at(perpsim_config const* cfg, size_t i)
{
    require(cfg != nullptr, "null configuration handle");
    require(i < cfg->scenarios.size(), "scenario index out of range");
    return cfg->scenarios[i];
}

perpsim::RunOptions to_options(perpsim_run_options const* opts)
{
    perpsim::RunOptions o;
    if (opts)
    {
        o.workers = std::max(1u, opts->workers);
        o.record_time = opts->record_time != 0;
        if (opts->has_seed_override)
        {
            o.seed_override = opts->seed_override;
        }
    }
    return o;
}

perpsim_results* make_results(std::vector<perpsim::ScenarioResult> rows)
{
    auto* r = new perpsim_results;
    r->rows = std::move(rows);
    r->csv = perpsim::format_csv(r->rows);
    return r;
}
}  // namespace

//---------------------------------------------------------------------------//
extern "C" {

char const* perpsim_version(void)
{
    return "0.1.0";
}

char const* perpsim_last_error(void)
{
    return g_last_error.c_str();
}

void perpsim_last_refusal(double* budget, double* largest_delta)
{
    if (budget)
    {
        *budget = g_refusal_budget;
    }
    if (largest_delta)
    {
        *largest_delta = g_refusal_largest;
    }
}

perpsim_run_options perpsim_default_run_options(void)
{
    return perpsim_run_options{1, 1, 0, 0};
}

perpsim_status perpsim_config_load(char const* path, perpsim_config** out)
{
    return guarded([&] {
        require(path && out, "null argument");
        *out = nullptr;
        auto sc = perpsim::load_config(path);
        *out = new perpsim_config{std::move(sc)};
    });
}

perpsim_status perpsim_config_parse(char const* text, perpsim_config** out)
{
    return guarded([&] {
        require(text && out, "null argument");
        *out = nullptr;
        auto sc = perpsim::parse_config(text);
        *out = new perpsim_config{std::move(sc)};
    });
}

perpsim_status perpsim_config_appendix(uint64_t reps, perpsim_config** out)
{
    return guarded([&] {
        require(out != nullptr, "null argument");
        require(reps >= 1, "reps must be at least 1");
        *out = new perpsim_config{perpsim::appendix_scenarios(reps)};
    });
}

perpsim_status perpsim_config_write(perpsim_config const* cfg,
                                    char const* path)
{
    return guarded([&] {
        require(cfg && path, "null argument");
        std::string const text = perpsim::to_config_text(cfg->scenarios);
        FILE* f = std::fopen(path, "wb");
        if (!f)
        {
            throw perpsim::IoError(std::string("cannot open '") + path
                                   + "' for writing");
        }
        bool const ok = std::fwrite(text.data(), 1, text.size(), f)
                        == text.size();
        if (std::fclose(f) != 0 || !ok)
        {
            throw perpsim::IoError(std::string("failed writing '") + path
                                   + "'");
        }
    });
}

size_t perpsim_config_size(perpsim_config const* cfg)
{
    return cfg ? cfg->scenarios.size() : 0;
}

char const* perpsim_config_name(perpsim_config const* cfg, size_t index)
{
    if (!cfg || index >= cfg->scenarios.size())
    {
        return nullptr;
    }
    return cfg->scenarios[index].name.c_str();
}

void perpsim_config_free(perpsim_config* cfg)
{
    delete cfg;
}

//---------------------------------------------------------------------------//
perpsim_status perpsim_run(perpsim_config const* cfg,
                           perpsim_run_options const* opts,
                           perpsim_results** out)
{
    return guarded([&] {
        require(cfg && out, "null argument");
        *out = nullptr;
        auto const o = to_options(opts);
        std::vector<perpsim::ScenarioResult> rows;
        for (auto const& sc : cfg->scenarios)
        {
            rows.push_back(perpsim::run_scenario(sc, o));
        }
        *out = make_results(std::move(rows));
    });
}

size_t perpsim_results_size(perpsim_results const* res)
{
    return res ? res->rows.size() : 0;
}

perpsim_status perpsim_results_row(perpsim_results const* res,
                                   size_t index,
                                   perpsim_row* row)
{
    return guarded([&] {
        require(res && row, "null argument");
        require(index < res->rows.size(), "row index out of range");
        auto const& r = res->rows[index];
        auto const& s = r.stats;
        auto const cv = s.cv();
        row->delta = r.delta;
        row->reps = s.n;
        row->estimate = s.mean;
        row->std_err = s.std_err();
        row->has_cv = cv.has_value();
        row->cv = cv.value_or(std::numeric_limits<double>::quiet_NaN());
        row->ci_lo = s.ci_lo();
        row->ci_hi = s.ci_hi();
        row->mean_steps = s.mean_steps();
        row->max_steps = s.max_steps;
        row->capped_count = s.capped_count;
        row->seed = r.seed;
        row->wall_ms
            = r.wall_ms.value_or(std::numeric_limits<double>::quiet_NaN());
    });
}

char const* perpsim_results_metadata(perpsim_results const* res, size_t index)
{
    if (!res || index >= res->rows.size())
    {
        return nullptr;
    }
    return res->rows[index].metadata.c_str();
}

char const* perpsim_results_csv(perpsim_results const* res)
{
    return res ? res->csv.c_str() : nullptr;
}

perpsim_status perpsim_results_write_csv(perpsim_results const* res,
                                         char const* path)
{
    return guarded([&] {
        require(res && path, "null argument");
        perpsim::emit_csv(path, res->rows);
    });
}

void perpsim_results_free(perpsim_results* res)
{
    delete res;
}

//---------------------------------------------------------------------------//
perpsim_status perpsim_theta_star(perpsim_config const* cfg,
                                  size_t index,
                                  perpsim_tilt_info* out)
{
    return guarded([&] {
        require(out != nullptr, "null argument");
        auto const& sc = scenario_at(cfg, index);
        auto const model = perpsim::build_model(sc);
        auto const env = perpsim::find_theta_star(model);
        out->theta_star = env.theta_star;
        out->psi_at_root = env.psi_at_root;
        out->mu = env.mu;
        out->num_states = model.num_states();
        // Reported on the caller's scale, so undo the ARCH level mapping
        double const largest = perpsim::largest_admissible_delta(model, env);
        out->largest_admissible_delta
            = largest * (sc.model == "arch1" && !sc.raw_level ? sc.alpha1
                                                              : 1.0);
    });
}

perpsim_status perpsim_eigvec(perpsim_config const* cfg,
                              size_t index,
                              double* buf,
                              size_t capacity,
                              size_t* count)
{
    return guarded([&] {
        require(count != nullptr, "null argument");
        auto const model = perpsim::build_model(scenario_at(cfg, index));
        auto const env = perpsim::find_theta_star(model);
        *count = env.u_star.size();
        require(buf == nullptr || capacity >= env.u_star.size(),
                "buffer too small");
        if (buf)
        {
            std::copy(env.u_star.begin(), env.u_star.end(), buf);
        }
    });
}

perpsim_status perpsim_slope(perpsim_config const* cfg,
                             size_t index,
                             perpsim_run_options const* opts,
                             perpsim_slope_info* out,
                             perpsim_results** points)
{
    return guarded([&] {
        require(out != nullptr, "null argument");
        if (points)
        {
            *points = nullptr;
        }
        auto res = perpsim::slope_check(scenario_at(cfg, index),
                                        to_options(opts));
        out->slope = res.slope;
        out->std_err = res.std_err;
        out->theta_star = res.theta_star;
        if (points)
        {
            *points = make_results(std::move(res.points));
        }
    });
}

perpsim_status perpsim_verify_lyapunov(perpsim_config const* cfg,
                                       size_t index,
                                       size_t probes,
                                       uint64_t samples_per_probe,
                                       perpsim_drift_report* out)
{
    return guarded([&] {
        require(out != nullptr, "null argument");
        require(probes >= 1, "probes must be at least 1");
        auto const& sc = scenario_at(cfg, index);
        require(sc.delta.has_value(), "scenario has no delta");
        auto const model = perpsim::build_model(sc);
        auto const env = perpsim::find_theta_star(model);
        auto const lyap = perpsim::select_params(
            model,
            env,
            perpsim::sampler_delta(sc, *sc.delta),
            sc.enforce_budget ? perpsim::BudgetPolicy::enforce
                              : perpsim::BudgetPolicy::report);

        // Stream 0 places the probes; probe i draws from stream i + 1
        perpsim::RngStream placer(sc.seed, 0);
        auto const where = perpsim::random_probes(placer, lyap, probes);
        *out = perpsim_drift_report{};
        out->probes = probes;
        out->budget = lyap.budget;
        out->guaranteed = lyap.guaranteed;
        out->worst_ratio = -std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < where.size(); ++i)
        {
            perpsim::RngStream rng(sc.seed, i + 1);
            auto const est = perpsim::verify_drift(
                rng, model, env, lyap, where[i], samples_per_probe);
            out->passed += est.pass ? 1 : 0;
            if (est.ratio > out->worst_ratio)
            {
                out->worst_ratio = est.ratio;
                out->worst_std_err = est.std_err;
            }
        }
    });
}

}  // extern "C"
