//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file estimators.cpp
//---------------------------------------------------------------------------//
#include "perpsim/estimators.hpp"

#include <cassert>
#include <cmath>

#include "perpsim/error.hpp"
#include "perpsim/tilting.hpp"

namespace perpsim
{
namespace
{
//! Running (S, D, X) of a path
struct PathState
{
    double s = 0;
    double d = 0;
    StateIndex x = 0;
    double max_s = 0;

    void advance(StepSample const& step, double delta)
    {
        s += step.gamma;
        [[maybe_unused]] double const prev = d;
        d += delta * step.reward * std::exp(s);
        assert(d >= prev);
        x = step.next_state;
        max_s = std::max(max_s, s);
    }
};
}  // namespace

char const* to_string(TerminationCause c) noexcept
{
    switch (c)
    {
        case TerminationCause::hit:
            return "hit";
        case TerminationCause::truncated:
            return "truncated";
        case TerminationCause::capped:
            return "capped";
    }
    return "?";
}

void SamplerConfig::validate() const
{
    if (!(delta > 0 && delta < 1))
    {
        throw InvalidArgument("delta must be in (0,1)");
    }
    if (!(a > 0 && a < 1))
    {
        throw InvalidArgument("a must be in (0,1)");
    }
    if (n_star < 1)
    {
        throw InvalidArgument("n_star must be at least 1");
    }
    if (step_cap < n_star)
    {
        throw InvalidArgument("step_cap must be at least n_star");
    }
}

std::uint64_t default_n_star(double delta)
{
    return static_cast<std::uint64_t>(std::ceil(10 * std::log(1 / delta)));
}

//---------------------------------------------------------------------------//
ReplicationResult crude(RngStream& rng,
                        Model const& model,
                        SamplerConfig const& cfg,
                        PathStart const& start)
{
    PathState path{start.s, start.d, start.x.value_or(model.initial_state())};
    path.max_s = start.s;
    ReplicationResult out;
    while (!(path.d > 1) && out.steps < cfg.step_cap)
    {
        path.advance(nominal_step(rng, model, path.x), cfg.delta);
        ++out.steps;
    }
    bool const hit = path.d > 1;
    out.value = hit ? 1.0 : 0.0;
    out.cause = hit ? TerminationCause::hit : TerminationCause::truncated;
    out.max_s = path.max_s;
    return out;
}

ReplicationResult naive_is(DemoOptIn,
                           RngStream& rng,
                           Model const& model,
                           TiltEnvelope const& env,
                           SamplerConfig const& cfg)
{
    PathState path{0, 0, model.initial_state()};
    double log_lr = 0;
    ReplicationResult out;
    while (!(path.d > 1) && out.steps < cfg.step_cap)
    {
        auto const step = tilted_step(rng, env, model, path.x);
        log_lr += step.log_lr;
        path.advance(step, cfg.delta);
        ++out.steps;
    }
    bool const hit = path.d > 1;
    out.value = hit ? std::exp(log_lr) : 0.0;
    out.cause = hit ? TerminationCause::hit : TerminationCause::capped;
    out.log_lr_final = log_lr;
    out.max_s = path.max_s;
    return out;
}

ReplicationResult state_independent(RngStream& rng,
                                    Model const& model,
                                    TiltEnvelope const& env,
                                    SamplerConfig const& cfg)
{
    PathState path{0, 0, model.initial_state()};
    double log_lr = 0;
    ReplicationResult out;
    while (!(path.d > cfg.a))
    {
        if (out.steps == cfg.step_cap)
        {
            out.cause = TerminationCause::capped;
            out.log_lr_final = log_lr;
            out.max_s = path.max_s;
            return out;
        }
        auto const step = tilted_step(rng, env, model, path.x);
        log_lr += step.log_lr;
        path.advance(step, cfg.delta);
        ++out.steps;
    }
    // D is nondecreasing, so stopping at the first crossing gives the same
    // indicator as running all n_star steps.
    for (std::uint64_t k = 0; k < cfg.n_star && !(path.d > 1); ++k)
    {
        path.advance(nominal_step(rng, model, path.x), cfg.delta);
        ++out.steps;
    }
    bool const hit = path.d > 1;
    out.value = hit ? std::exp(log_lr) : 0.0;
    out.cause = hit ? TerminationCause::hit : TerminationCause::truncated;
    out.log_lr_final = log_lr;
    out.max_s = path.max_s;
    return out;
}

ReplicationResult state_dependent(RngStream& rng,
                                  Model const& model,
                                  TiltEnvelope const& env,
                                  LyapunovParams const& lyap,
                                  SamplerConfig const& cfg)
{
    return state_dependent_traced(
        rng, model, env, lyap, cfg, [](SdTraceStep const&) {});
}

double estimate_cstar(double phi_hat, double delta, double theta_star)
{
    if (!(phi_hat > 0))
    {
        throw InvalidArgument("phi_hat must be positive");
    }
    if (!(delta > 0 && delta < 1))
    {
        throw InvalidArgument("delta must be in (0,1)");
    }
    return phi_hat / std::pow(delta, theta_star);
}

}  // namespace perpsim
