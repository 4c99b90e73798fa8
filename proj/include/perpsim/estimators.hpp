//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file perpsim/estimators.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <optional>

#include "lyapunov.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "spectral.hpp"

namespace perpsim
{
//---------------------------------------------------------------------------//
enum class TerminationCause
{
    hit,  //!< D crossed 1
    truncated,  //!< fixed horizon ended without a crossing (crude, SI)
    capped  //!< the step_cap safety net fired
};

char const* to_string(TerminationCause c) noexcept;

//---------------------------------------------------------------------------//
//! One draw of an estimator.
struct ReplicationResult
{
    double value = 0;
    std::uint64_t steps = 0;
    TerminationCause cause = TerminationCause::truncated;
    double log_lr_final = 0;
    double max_s = 0;
};

//---------------------------------------------------------------------------//
/*!
 * Per-replication sampler settings.
 *
 * \c delta is the perpetuity scale: the event is sum_k lambda_k e^{S_k} >
 * 1/delta. \c a and \c n_star only affect the state-independent sampler.
 */
struct SamplerConfig
{
    double delta = 0.1;
    double a = 0.9;
    std::uint64_t n_star = 1;
    std::uint64_t step_cap = 1000000;

    // Throws InvalidArgument on any violated constraint
    void validate() const;
};

// ceil(10 log(1/delta))
std::uint64_t default_n_star(double delta);

//! Starting point (S_0, D_0, X_0); unset state means the model's x0
struct PathStart
{
    double s = 0;
    double d = 0;
    std::optional<StateIndex> x;
};

//! Tag required to run the full-tilt estimator, which can have infinite
//! variance and exists only as a demonstration.
struct DemoOptIn
{
    explicit DemoOptIn() = default;
};

// Crude Monte Carlo: indicator of crossing within step_cap nominal steps
ReplicationResult crude(RngStream& rng,
                        Model const& model,
                        SamplerConfig const& cfg,
                        PathStart const& start = {});

// Tilt every step until the crossing
ReplicationResult naive_is(DemoOptIn,
                           RngStream& rng,
                           Model const& model,
                           TiltEnvelope const& env,
                           SamplerConfig const& cfg);

// Tilt until D > a, then n_star nominal steps (biased downward)
ReplicationResult state_independent(RngStream& rng,
                                    Model const& model,
                                    TiltEnvelope const& env,
                                    SamplerConfig const& cfg);

// Unbiased Lyapunov-region sampler
ReplicationResult state_dependent(RngStream& rng,
                                  Model const& model,
                                  TiltEnvelope const& env,
                                  LyapunovParams const& lyap,
                                  SamplerConfig const& cfg);

//---------------------------------------------------------------------------//
//! Per-step record of the state-dependent sampler (for diagnostics/tests).
struct SdTraceStep
{
    double s = 0;
    double d = 0;
    double z = 0;
    StateIndex x = 0;
    Region region = Region::tilt;
};

// Same sampler as state_dependent, reporting every visited state to `visit`.
template<class Visitor>
ReplicationResult state_dependent_traced(RngStream& rng,
                                         Model const& model,
                                         TiltEnvelope const& env,
                                         LyapunovParams const& lyap,
                                         SamplerConfig const& cfg,
                                         Visitor&& visit);

// phi_hat / delta^theta*
double estimate_cstar(double phi_hat, double delta, double theta_star);

}  // namespace perpsim

#include "estimators.i.hpp"
