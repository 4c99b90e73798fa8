//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file harness.cpp
//---------------------------------------------------------------------------//
#include "perpsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "perpsim/error.hpp"
#include "perpsim/lyapunov.hpp"
#include "perpsim/spectral.hpp"

namespace perpsim
{
namespace
{
// Replications per work unit; fixed so the merge tree never depends on the
// number of workers.
constexpr std::uint64_t kChunk = 1024;

constexpr std::uint64_t kCrudeCapShort = 1000;
constexpr std::uint64_t kCrudeCapMarkov = 100000;
constexpr std::uint64_t kDefaultCap = 1000000;

using Replicate = std::function<ReplicationResult(RngStream&)>;
using Clock = std::chrono::steady_clock;

std::string model_label(Scenario const& sc)
{
    if (sc.model == "arch1")
    {
        return "arch1:" + format_double(sc.alpha0) + ":"
               + format_double(sc.alpha1);
    }
    if (sc.model == "normal")
    {
        return "normal:" + format_double(sc.mean) + ":"
               + format_double(sc.stddev);
    }
    return sc.model;
}

//---------------------------------------------------------------------------//
SummaryStats run_chunk(Replicate const& rep,
                       std::uint64_t seed,
                       std::uint64_t begin,
                       std::uint64_t end)
{
    SummaryStats s;
    for (std::uint64_t i = begin; i < end; ++i)
    {
        RngStream rng(seed, i);
        s.add(rep(rng));
    }
    return s;
}

/*!
 * Fan chunks out over workers.
 *
 * Reps mode runs exactly ceil(reps / kChunk) chunks. Budget mode keeps
 * claiming chunks until the deadline, then merges every claimed chunk.
 */
SummaryStats run_chunks(Replicate const& rep,
                        std::uint64_t seed,
                        std::optional<std::uint64_t> reps,
                        std::optional<double> budget_ms,
                        unsigned workers)
{
    workers = std::max(1u, workers);
    std::uint64_t const max_chunks
        = reps ? (*reps + kChunk - 1) / kChunk
               : std::numeric_limits<std::uint64_t>::max() / kChunk;
    auto const deadline
        = Clock::now()
          + std::chrono::microseconds(
              static_cast<std::int64_t>(budget_ms.value_or(0) * 1000));

    std::atomic<std::uint64_t> next{0};
    std::mutex lock;
    std::vector<std::pair<std::uint64_t, SummaryStats>> done;
    std::exception_ptr error;

    auto work = [&] {
        try
        {
            for (;;)
            {
                if (budget_ms && Clock::now() >= deadline)
                {
                    return;
                }
                std::uint64_t const c = next.fetch_add(1);
                if (c >= max_chunks)
                {
                    return;
                }
                std::uint64_t const begin = c * kChunk;
                std::uint64_t const end
                    = reps ? std::min(*reps, begin + kChunk) : begin + kChunk;
                auto stats = run_chunk(rep, seed, begin, end);
                std::lock_guard<std::mutex> g(lock);
                done.emplace_back(c, stats);
            }
        }
        catch (...)
        {
            std::lock_guard<std::mutex> g(lock);
            if (!error)
            {
                error = std::current_exception();
            }
            next.store(max_chunks);
        }
    };

    if (workers == 1)
    {
        work();
    }
    else
    {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
        {
            pool.emplace_back(work);
        }
        for (auto& t : pool)
        {
            t.join();
        }
    }
    if (error)
    {
        std::rethrow_exception(error);
    }
    std::sort(done.begin(), done.end(), [](auto const& a, auto const& b) {
        return a.first < b.first;
    });
    SummaryStats total;
    for (auto const& [c, s] : done)
    {
        total.merge(s);
    }
    return total;
}
}  // namespace

//---------------------------------------------------------------------------//
char const* to_string(EstimatorKind e) noexcept
{
    switch (e)
    {
        case EstimatorKind::crude:
            return "crude";
        case EstimatorKind::naive:
            return "naive";
        case EstimatorKind::si:
            return "si";
        case EstimatorKind::sd:
            return "sd";
    }
    return "?";
}

Model build_model(Scenario const& sc)
{
    if (sc.model == "arch1")
    {
        return make_arch1(sc.alpha0, sc.alpha1);
    }
    if (sc.model == "two_state")
    {
        return make_two_state_demo();
    }
    if (sc.model == "normal")
    {
        return make_normal_walk(sc.mean, sc.stddev, sc.reward);
    }
    if (sc.model == "custom" && sc.custom)
    {
        return Model(*sc.custom);
    }
    throw InvalidArgument("unknown model '" + sc.model + "'");
}

double sampler_delta(Scenario const& sc, double delta)
{
    if (sc.model == "arch1" && !sc.raw_level)
    {
        return delta / sc.alpha1;
    }
    return delta;
}

SamplerConfig
sampler_config(Scenario const& sc, Model const& model, double delta)
{
    SamplerConfig cfg;
    cfg.delta = sampler_delta(sc, delta);
    cfg.a = sc.a.value_or(0.9);
    cfg.n_star = sc.n_star.value_or(default_n_star(delta));
    if (sc.step_cap)
    {
        cfg.step_cap = *sc.step_cap;
    }
    else if (sc.estimator == EstimatorKind::crude)
    {
        cfg.step_cap = (sc.model == "arch1" || model.num_states() == 1)
                           ? kCrudeCapShort
                           : kCrudeCapMarkov;
    }
    else
    {
        cfg.step_cap = kDefaultCap;
    }
    cfg.step_cap = std::max(cfg.step_cap, cfg.n_star);
    cfg.validate();
    return cfg;
}

//---------------------------------------------------------------------------//
ScenarioResult
run_scenario_at(Scenario const& sc, double delta, RunOptions const& opts)
{
    Model const model = build_model(sc);
    SamplerConfig const cfg = sampler_config(sc, model, delta);
    std::uint64_t const seed = opts.seed_override.value_or(sc.seed);

    nlohmann::json meta;
    meta["model"] = model.name();
    meta["estimator"] = to_string(sc.estimator);
    meta["delta"] = delta;
    meta["sampler_delta"] = cfg.delta;
    meta["level_mapping"] = (sc.model == "arch1" && !sc.raw_level)
                                ? "arch level alpha1/delta"
                                : "none";
    meta["step_cap"] = cfg.step_cap;
    meta["mode"] = sc.reps ? "reps" : "budget";
    meta["deterministic"] = sc.reps.has_value();
    meta["workers"] = opts.workers;

    std::optional<TiltEnvelope> env;
    std::optional<LyapunovParams> lyap;
    if (sc.estimator != EstimatorKind::crude)
    {
        env = find_theta_star(model);
        meta["theta_star"] = env->theta_star;
        meta["mu"] = env->mu;
    }

    Replicate rep;
    switch (sc.estimator)
    {
        case EstimatorKind::crude:
            meta["bias"] = "downward: paths are truncated at step_cap";
            rep = [&](RngStream& rng) { return crude(rng, model, cfg); };
            break;
        case EstimatorKind::naive:
            meta["bias"] = "none up to capping; variance may be infinite";
            rep = [&](RngStream& rng) {
                return naive_is(DemoOptIn{}, rng, model, *env, cfg);
            };
            break;
        case EstimatorKind::si:
            meta["bias"] = "downward: nominal continuation truncated after "
                           "n_star steps";
            meta["a"] = cfg.a;
            meta["n_star"] = cfg.n_star;
            rep = [&](RngStream& rng) {
                return state_independent(rng, model, *env, cfg);
            };
            break;
        case EstimatorKind::sd:
            lyap = select_params(model,
                                 *env,
                                 cfg.delta,
                                 sc.enforce_budget ? BudgetPolicy::enforce
                                                   : BudgetPolicy::report);
            meta["bias"] = "none; capped replications reported separately";
            meta["drift_budget"] = lyap->budget;
            meta["guaranteed"] = lyap->guaranteed;
            meta["c_delta"] = lyap->c_delta;
            meta["rho"] = lyap->rho;
            meta["b2_rule"] = lyap->b2_rule;
            rep = [&](RngStream& rng) {
                return state_dependent(rng, model, *env, *lyap, cfg);
            };
            break;
    }

    auto const start = Clock::now();
    SummaryStats stats
        = run_chunks(rep, seed, sc.reps, sc.budget_ms, opts.workers);
    auto const stop = Clock::now();

    ScenarioResult out;
    out.scenario = sc.name;
    out.model = model_label(sc);
    out.estimator = to_string(sc.estimator);
    out.delta = delta;
    out.seed = seed;
    out.stats = stats;
    if (opts.record_time)
    {
        out.wall_ms
            = std::chrono::duration<double, std::milli>(stop - start).count();
    }
    meta["capped_count"] = stats.capped_count;
    out.metadata = meta.dump();
    return out;
}

ScenarioResult run_scenario(Scenario const& sc, RunOptions const& opts)
{
    if (!sc.delta)
    {
        throw ConfigError("scenario '" + sc.name + "' has no delta");
    }
    return run_scenario_at(sc, *sc.delta, opts);
}

//---------------------------------------------------------------------------//
std::string format_double(double v)
{
    char buf[64];
    auto const [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{})
    {
        throw NumericError("cannot format floating point value");
    }
    return std::string(buf, ptr);
}

std::string csv_header()
{
    return "scenario,model,estimator,delta,reps,estimate,std_err,cv,ci_lo,"
           "ci_hi,mean_steps,max_steps,capped_count,seed,wall_ms";
}

std::string csv_row(ScenarioResult const& r)
{
    auto const& s = r.stats;
    auto const cv = s.cv();
    std::string row;
    row += r.scenario + ',' + r.model + ',' + r.estimator + ',';
    row += format_double(r.delta) + ',';
    row += std::to_string(s.n) + ',';
    row += format_double(s.mean) + ',';
    row += format_double(s.std_err()) + ',';
    row += (cv ? format_double(*cv) : std::string("NA")) + ',';
    row += format_double(s.ci_lo()) + ',';
    row += format_double(s.ci_hi()) + ',';
    row += format_double(s.mean_steps()) + ',';
    row += std::to_string(s.max_steps) + ',';
    row += std::to_string(s.capped_count) + ',';
    row += std::to_string(r.seed) + ',';
    row += r.wall_ms ? format_double(*r.wall_ms) : std::string("NA");
    return row;
}

std::string format_csv(std::vector<ScenarioResult> const& rows)
{
    std::string out = csv_header() + '\n';
    for (auto const& r : rows)
    {
        out += csv_row(r) + '\n';
    }
    return out;
}

void emit_csv(std::string const& path, std::vector<ScenarioResult> const& rows)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
    {
        throw IoError("cannot open '" + path + "' for writing");
    }
    f << format_csv(rows);
    if (!f)
    {
        throw IoError("failed writing '" + path + "'");
    }
}

//---------------------------------------------------------------------------//
SlopeResult slope_check(Scenario const& sc, RunOptions const& opts)
{
    if (sc.estimator != EstimatorKind::si)
    {
        throw InvalidArgument("slope_check uses the si estimator");
    }
    if (sc.deltas.size() < 3)
    {
        throw InvalidArgument("slope_check needs at least 3 deltas");
    }
    auto const [lo, hi] = std::minmax_element(sc.deltas.begin(),
                                              sc.deltas.end());
    if (*hi / *lo < 100 * (1 - 1e-12))
    {
        throw InvalidArgument("deltas must span at least two decades");
    }

    SlopeResult res;
    res.theta_star = find_theta_star(build_model(sc)).theta_star;
    std::vector<double> x, y, w;
    for (double d : sc.deltas)
    {
        auto r = run_scenario_at(sc, d, opts);
        if (!(r.stats.mean > 0))
        {
            throw NumericError("phi_hat = 0 at delta = " + format_double(d)
                               + "; increase reps");
        }
        double const rel = r.stats.std_err() / r.stats.mean;
        x.push_back(std::log(d));
        y.push_back(std::log(r.stats.mean));
        w.push_back(rel > 0 ? 1 / (rel * rel) : 0.0);
        res.points.push_back(std::move(r));
    }
    // Fall back to equal weights if any point has zero spread
    if (std::any_of(w.begin(), w.end(), [](double v) { return v == 0; }))
    {
        std::fill(w.begin(), w.end(), 1.0);
    }
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    double const xbar = sx / sw;
    double const ybar = sy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
        sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
    }
    res.slope = sxy / sxx;
    res.std_err = std::sqrt(1 / sxx);
    return res;
}

//---------------------------------------------------------------------------//
std::vector<Scenario> appendix_scenarios(std::uint64_t reps)
{
    struct Arch
    {
        double a0, a1;
        char const* tag;
    };
    static Arch const arch[] = {{1, 0.75, "arch_1_3q"},
                                {2, 0.75, "arch_2_3q"},
                                {1, 0.8, "arch_1_4f"},
                                {2, 0.8, "arch_2_4f"}};
    static double const arch_deltas[] = {0.1, 0.05, 1e-3, 5e-4, 1e-5};
    static double const markov_deltas[] = {0.1, 0.05, 0.02, 0.005, 0.002};
    static EstimatorKind const kinds[]
        = {EstimatorKind::crude, EstimatorKind::si, EstimatorKind::sd};

    std::vector<Scenario> out;
    auto add = [&](Scenario sc, double delta, EstimatorKind k) {
        sc.estimator = k;
        sc.delta = delta;
        sc.reps = reps;
        sc.seed = 20240101;
        sc.enforce_budget = false;
        sc.name += std::string("_") + to_string(k) + "_"
                   + format_double(delta);
        out.push_back(std::move(sc));
    };
    for (auto const& m : arch)
    {
        Scenario base;
        base.name = m.tag;
        base.model = "arch1";
        base.alpha0 = m.a0;
        base.alpha1 = m.a1;
        for (auto k : kinds)
        {
            for (double d : arch_deltas)
            {
                add(base, d, k);
            }
        }
    }
    Scenario markov;
    markov.name = "two_state";
    markov.model = "two_state";
    for (auto k : kinds)
    {
        for (double d : markov_deltas)
        {
            add(markov, d, k);
        }
    }
    return out;
}

}  // namespace perpsim
