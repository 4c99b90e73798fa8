//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file perpsim/estimators.i.hpp
//! \brief Template definitions for estimators.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>

#include "tilting.hpp"

namespace perpsim
{
//---------------------------------------------------------------------------//
/*!
 * State-dependent sampler.
 *
 * Z = (1 - D) e^{-S} is advanced by its own recursion Z' = Z e^{-gamma} -
 * Delta lambda and drives both region membership and termination; (S, D) are
 * carried alongside for the likelihood ratio and diagnostics.
 */
template<class Visitor>
ReplicationResult state_dependent_traced(RngStream& rng,
                                         Model const& model,
                                         TiltEnvelope const& env,
                                         LyapunovParams const& lyap,
                                         SamplerConfig const& cfg,
                                         Visitor&& visit)
{
    StateIndex x = model.initial_state();
    double s = 0;
    double d = 0;
    double z = 1;
    double log_lr = 0;
    ReplicationResult out;
    for (;;)
    {
        Region const region = classify(lyap, x, z);
        visit(SdTraceStep{s, d, z, x, region});
        if (region == Region::terminal)
        {
            out.value = std::exp(log_lr);
            out.cause = TerminationCause::hit;
            break;
        }
        if (out.steps == cfg.step_cap)
        {
            out.value = 0;
            out.cause = TerminationCause::capped;
            break;
        }
        StepSample const step = region == Region::tilt
                                    ? tilted_step(rng, env, model, x)
                                    : nominal_step(rng, model, x);
        log_lr += step.log_lr;
        s += step.gamma;
        [[maybe_unused]] double const d_prev = d;
        d += cfg.delta * step.reward * std::exp(s);
        assert(d >= d_prev);
        z = z * std::exp(-step.gamma) - cfg.delta * step.reward;
        x = step.next_state;
        out.max_s = std::max(out.max_s, s);
        ++out.steps;
    }
    out.log_lr_final = log_lr;
    return out;
}

}  // namespace perpsim
