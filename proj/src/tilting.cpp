//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file tilting.cpp
//---------------------------------------------------------------------------//
#include "perpsim/tilting.hpp"

#include <cmath>
#include <variant>


namespace perpsim
{
namespace
{
template<class... Ts>
struct Overloaded : Ts...
{
    using Ts::operator()...;
};
}  // namespace

double sample_increment(RngStream& rng, IncrementFamily const& family)
{
    return std::visit(
        Overloaded{[&rng](LogChiSquareIncrement const& f) {
                       double const z = rng.normal();
                       return std::log(f.scale * z * z);
                   },
                   [&rng](NormalIncrement const& f) {
                       return f.mean + f.stddev * rng.normal();
                   }},
        family);
}

double sample_tilted_increment(RngStream& rng,
                               IncrementFamily const& family,
                               double theta)
{
    return std::visit(
        Overloaded{[&](LogChiSquareIncrement const& f) {
                       // w^theta * w^(-1/2) e^(-w/2) is a Gamma(theta + 1/2,
                       // scale 2) kernel
                       double const w = 2.0 * rng.gamma(theta + 0.5);
                       return std::log(f.scale * w);
                   },
                   [&](NormalIncrement const& f) {
                       return f.mean + theta * f.stddev * f.stddev
                              + f.stddev * rng.normal();
                   }},
        family);
}

double sample_reward(RngStream& rng, RewardFamily const& family)
{
    return std::visit(
        Overloaded{[](ConstantReward const& r) { return r.value; },
                   [&rng](LognormalReward const& r) {
                       return std::exp(r.log_mean + r.log_sd * rng.normal());
                   }},
        family);
}

StepSample nominal_step(RngStream& rng, Model const& model, StateIndex x)
{
    StepSample out;
    out.next_state = sample_row(rng, model.cumulative_row(x));
    out.gamma = sample_increment(rng, model.increment(out.next_state));
    out.reward = sample_reward(rng, model.reward(out.next_state));
    return out;
}

StepSample tilted_step(RngStream& rng,
                       TiltEnvelope const& env,
                       Model const& model,
                       StateIndex x)
{
    StepSample out;
    out.next_state = sample_row(rng, env.tilted_cumulative[x]);
    out.gamma = sample_tilted_increment(
        rng, model.increment(out.next_state), env.theta_star);
    out.reward = sample_reward(rng, model.reward(out.next_state));
    out.log_lr = -env.theta_star * out.gamma + env.log_u_star[x]
                 - env.log_u_star[out.next_state];
    return out;
}

double tilted_increment_mean(Model const& model, StateIndex x, double theta)
{
    return cgf_derivative(model.increment(x), theta);
}

}  // namespace perpsim
