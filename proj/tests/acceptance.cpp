//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file acceptance.cpp
//! \brief End-to-end checks; prints one PASS/FAIL line per criterion
//---------------------------------------------------------------------------//
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "perpsim/estimators.hpp"
#include "perpsim/harness.hpp"
#include "perpsim/lyapunov.hpp"
#include "perpsim/model.hpp"
#include "perpsim/rng.hpp"
#include "perpsim/spectral.hpp"
#include "perpsim/stats.hpp"
#include "perpsim/tilting.hpp"

using namespace perpsim;

namespace
{
using Clock = std::chrono::steady_clock;

struct Verdict
{
    bool pass = false;
    std::string detail;
};

std::string fmt(char const* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Scenario scenario(std::string const& text)
{
    return parse_config(text).front();
}

ScenarioResult run(std::string const& text)
{
    return run_scenario(scenario(text), RunOptions{1, false, {}});
}

bool overlap(double lo1, double hi1, double lo2, double hi2)
{
    return lo1 <= hi2 && lo2 <= hi1;
}

std::string describe(ScenarioResult const& r)
{
    auto const& s = r.stats;
    return r.estimator + "@" + format_double(r.delta) + " est="
           + fmt("%.4g", s.mean) + " ci=[" + fmt("%.4g", s.ci_lo()) + ","
           + fmt("%.4g", s.ci_hi()) + "] cv=" + fmt("%.3g", s.cv().value_or(NAN))
           + "; ";
}

//---------------------------------------------------------------------------//
Verdict cramer_roots()
{
    struct Case
    {
        char const* label;
        Model model;
        double lo, hi;
    };
    std::vector<Case> cases;
    cases.push_back({"arch 3/4", make_arch1(1, 0.75), 1.45, 1.47});
    cases.push_back({"arch 4/5", make_arch1(1, 0.8), 1.33, 1.35});
    cases.push_back({"two-state", make_two_state_demo(), 1.59, 1.61});
    Verdict v{true, ""};
    for (auto const& c : cases)
    {
        auto const t0 = Clock::now();
        double const th = find_theta_star(c.model).theta_star;
        double const secs = seconds_since(t0);
        v.pass = v.pass && th >= c.lo && th <= c.hi && secs < 1;
        v.detail += std::string(c.label) + " " + fmt("%.6f", th) + " ("
                    + fmt("%.3f", secs) + " s); ";
    }
    return v;
}

Verdict closed_form_eigenvalue()
{
    auto const t0 = Clock::now();
    auto const m = make_two_state_demo();
    double worst = 0;
    for (int k = 1; k <= 20; ++k)
    {
        double const theta = 0.15 * k;
        double const closed = two_by_two_perron_root(tilted_matrix(m, theta));
        worst = std::max(worst, std::abs(std::exp(psi(m, theta)) - closed));
    }
    double const secs = seconds_since(t0);
    return {worst <= 1e-9 && secs < 1,
            "max abs diff " + fmt("%.3g", worst) + " over 20 points ("
                + fmt("%.3f", secs) + " s)"};
}

Verdict si_table()
{
    struct Row
    {
        double delta, ref, ref_lo, ref_hi;
    };
    Row const rows[] = {{0.1, 6.84e-2, 6.82e-2, 6.86e-2},
                        {1e-3, 1.10e-4, 1.09e-4, 1.10e-4},
                        {1e-5, 1.34e-7, 1.33e-7, 1.35e-7}};
    Verdict v{true, ""};
    for (auto const& row : rows)
    {
        auto const r = run("model=arch1\nalpha0=1\nalpha1=0.75\nestimator=si\n"
                           "a=0.9\nreps=100000\nseed=11\ndelta="
                           + format_double(row.delta));
        double const ref_se = (row.ref_hi - row.ref_lo) / 2 / 1.96;
        double const se = std::hypot(r.stats.std_err(), ref_se);
        double const cv = r.stats.cv().value_or(NAN);
        bool const ok = std::abs(r.stats.mean - row.ref) <= 3 * se
                        && cv >= 1.0 && cv <= 3.0;
        v.pass = v.pass && ok;
        v.detail += describe(r) + "z=" + fmt("%.2f", (r.stats.mean - row.ref) / se)
                    + "; ";
    }
    return v;
}

Verdict sd_table()
{
    auto const arch = run("model=arch1\nestimator=sd\ndelta=0.1\n"
                          "reps=100000\nseed=12\nenforce_budget=false");
    auto const two = run("model=two_state\nestimator=sd\ndelta=0.1\n"
                         "reps=100000\nseed=13\nenforce_budget=false");
    bool const ok = overlap(arch.stats.ci_lo(), arch.stats.ci_hi(), 6.63e-2,
                            6.96e-2)
                    && overlap(two.stats.ci_lo(), two.stats.ci_hi(), 5.35e-2,
                               6.10e-2);
    return {ok, describe(arch) + describe(two)};
}

Verdict cross_estimator()
{
    std::string const base = "model=arch1\ndelta=0.05\nenforce_budget=false\n";
    auto const crude = run(base + "estimator=crude\nreps=1000000\n"
                                  "step_cap=1000\nseed=21");
    auto const si = run(base + "estimator=si\nreps=100000\nseed=22");
    auto const sd = run(base + "estimator=sd\nreps=100000\nseed=23");
    auto ov = [](ScenarioResult const& a, ScenarioResult const& b) {
        return overlap(a.stats.ci_lo(), a.stats.ci_hi(), b.stats.ci_lo(),
                       b.stats.ci_hi());
    };
    return {ov(crude, si) && ov(crude, sd) && ov(si, sd),
            describe(crude) + describe(si) + describe(sd)};
}

Verdict slopes()
{
    auto const arch = slope_check(
        scenario("model=arch1\nestimator=si\nreps=100000\nseed=31\n"
                 "deltas=1e-2,1e-3,1e-4,1e-5"),
        RunOptions{1, false, {}});
    auto const normal = slope_check(
        scenario("model=normal\nmean=-1\nstddev=1\nestimator=si\n"
                 "reps=100000\nseed=32\ndeltas=1e-2,1e-3,1e-4,1e-5"),
        RunOptions{1, false, {}});
    double const e1 = std::abs(arch.slope - arch.theta_star) / arch.theta_star;
    double const e2 = std::abs(normal.slope - 2.0) / 2.0;
    return {e1 <= 0.05 && e2 <= 0.05,
            "arch slope " + fmt("%.4f", arch.slope) + " vs theta* "
                + fmt("%.4f", arch.theta_star) + "; normal slope "
                + fmt("%.4f", normal.slope) + " vs 2"};
}

Verdict drift_inequality()
{
    Verdict v{true, ""};
    for (std::string const m : {"arch1", "two_state"})
    {
        for (double delta : {1e-2, 1e-3})
        {
            auto const sc = scenario("model=" + m
                                     + "\nestimator=sd\nreps=1\nseed=41\n"
                                       "enforce_budget=false\ndelta="
                                     + format_double(delta));
            auto const model = build_model(sc);
            auto const env = find_theta_star(model);
            auto const p = select_params(model, env, sampler_delta(sc, delta),
                                         BudgetPolicy::report);
            RngStream placer(sc.seed, 0);
            auto const probes = random_probes(placer, p, 100);
            int passed = 0;
            double worst = 0;
            for (std::size_t i = 0; i < probes.size(); ++i)
            {
                RngStream rng(sc.seed, i + 1);
                auto const est = verify_drift(rng, model, env, p, probes[i],
                                              100000);
                passed += est.pass ? 1 : 0;
                worst = std::max(worst, est.ratio);
            }
            v.pass = v.pass && passed >= 95;
            v.detail += m + "@" + format_double(delta) + " "
                        + std::to_string(passed) + "/100 (worst ratio "
                        + fmt("%.3g", worst) + ", budget "
                        + fmt("%.3g", p.budget) + "); ";
        }
    }
    return v;
}

Verdict efficiency_ordering()
{
    std::string const base = "model=arch1\ndelta=1e-3\nenforce_budget=false\n";
    auto const crude = run(base + "estimator=crude\nreps=1000000\n"
                                  "step_cap=1000\nseed=51");
    auto const si = run(base + "estimator=si\nreps=100000\nseed=52");
    auto const sd = run(base + "estimator=sd\nreps=100000\nseed=53");
    double const cc = crude.stats.cv().value_or(NAN);
    double const cs = si.stats.cv().value_or(NAN);
    double const cd = sd.stats.cv().value_or(NAN);
    return {cd < cc && cs < cc && cc >= 20,
            describe(crude) + describe(si) + describe(sd)};
}

Verdict infinite_variance()
{
    auto const sc = scenario("model=normal\nmean=-0.6\nstddev=1\n"
                             "estimator=naive\ndemo=true\ndelta=0.01\n"
                             "reps=1\nseed=61");
    auto const model = build_model(sc);
    auto const env = find_theta_star(model);
    auto const cfg = sampler_config(sc, model, 0.01);
    SummaryStats s;
    std::vector<double> cvs;
    for (std::uint64_t i = 0; i < 1000000; ++i)
    {
        RngStream rng(sc.seed, i);
        s.add(naive_is(DemoOptIn{}, rng, model, env, cfg));
        if (s.n == 10000 || s.n == 100000 || s.n == 1000000)
        {
            cvs.push_back(s.cv().value_or(NAN));
        }
    }
    return {cvs[0] < cvs[1] && cvs[1] < cvs[2],
            "running cv " + fmt("%.3g", cvs[0]) + " -> " + fmt("%.3g", cvs[1])
                + " -> " + fmt("%.3g", cvs[2])};
}

Verdict termination_growth()
{
    std::string const base = "model=arch1\nestimator=sd\nreps=100000\n"
                             "enforce_budget=false\n";
    auto const hi = run(base + "delta=1e-2\nseed=71");
    auto const lo = run(base + "delta=1e-5\nseed=72");
    double const bound = hi.stats.mean_steps()
                         * std::pow(std::log(1e5) / std::log(1e2), 4);
    double const capped = static_cast<double>(lo.stats.capped_count)
                          / static_cast<double>(lo.stats.n);
    return {lo.stats.mean_steps() <= bound && capped <= 1e-5,
            "mean steps " + fmt("%.4g", hi.stats.mean_steps()) + " -> "
                + fmt("%.4g", lo.stats.mean_steps()) + " (bound "
                + fmt("%.4g", bound) + "), capped fraction "
                + fmt("%.3g", capped)};
}

Verdict likelihood_identities()
{
    Verdict v{true, ""};
    int worst_mismatch = 0;
    for (auto const& model : {make_arch1(1, 0.75), make_two_state_demo()})
    {
        auto const env = find_theta_star(model);
        for (StateIndex x = 0; x < model.num_states(); ++x)
        {
            RngStream rng(81, x);
            SummaryStats s;
            for (int i = 0; i < 1000000; ++i)
            {
                s.add(std::exp(tilted_step(rng, env, model, x).log_lr));
            }
            double const z = (s.mean - 1) / s.std_err();
            v.pass = v.pass && std::abs(z) <= 4;
            v.detail += model.name() + " x=" + std::to_string(x) + " mean "
                        + fmt("%.5f", s.mean) + " (z " + fmt("%.2f", z) + "); ";
        }
        auto const p = select_params(model, env, 1e-3, BudgetPolicy::report);
        RngStream rng(82, 0);
        int mismatches = 0;
        for (int i = 0; i < 10000; ++i)
        {
            auto const x = static_cast<StateIndex>(
                std::min<double>(model.num_states() - 1,
                                 rng.uniform() * model.num_states()));
            double const d = 0.999 * rng.uniform();
            double const z = p.threshold[x] * std::exp(8 * rng.uniform() - 4);
            double const s = std::log1p(-d) - std::log(z);
            bool const tilt = classify(p, x, z) == Region::tilt;
            mismatches += tilt != (h_value(p, s, d, x) < 1);
        }
        worst_mismatch = std::max(worst_mismatch, mismatches);
    }
    v.pass = v.pass && worst_mismatch == 0;
    v.detail += "region mismatches " + std::to_string(worst_mismatch);
    return v;
}

Verdict determinism()
{
    auto const scs = parse_config(
        "name=si\nmodel=arch1\nestimator=si\ndelta=1e-3\nreps=20000\nseed=5\n"
        "---\nname=sd\nmodel=arch1\nestimator=sd\ndelta=0.05\nreps=5000\n"
        "seed=6\nenforce_budget=false\n"
        "---\nname=crude\nmodel=two_state\nestimator=crude\ndelta=0.1\n"
        "reps=5000\nstep_cap=2000\nseed=7\n");
    std::vector<std::string> csvs;
    for (unsigned w : {1u, 4u, 8u})
    {
        std::vector<ScenarioResult> rows;
        for (auto const& sc : scs)
        {
            rows.push_back(run_scenario(sc, RunOptions{w, false, {}}));
        }
        csvs.push_back(format_csv(rows));
    }
    return {csvs[0] == csvs[1] && csvs[1] == csvs[2],
            std::to_string(csvs[0].size()) + " bytes compared"};
}
}  // namespace

//---------------------------------------------------------------------------//
int main()
{
    struct Criterion
    {
        char const* name;
        std::function<Verdict()> check;
    };
    std::vector<Criterion> const criteria = {
        {"cramer_roots", cramer_roots},
        {"closed_form_eigenvalue", closed_form_eigenvalue},
        {"si_table", si_table},
        {"sd_table", sd_table},
        {"cross_estimator", cross_estimator},
        {"slopes", slopes},
        {"drift_inequality", drift_inequality},
        {"efficiency_ordering", efficiency_ordering},
        {"infinite_variance", infinite_variance},
        {"termination_growth", termination_growth},
        {"likelihood_identities", likelihood_identities},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        auto const t0 = Clock::now();
        Verdict v;
        try
        {
            v = criteria[i].check();
        }
        catch (std::exception const& e)
        {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += v.pass ? 0 : 1;
        std::printf("%s %2zu %s [%.1f s] %s\n", v.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].name, seconds_since(t0), v.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
