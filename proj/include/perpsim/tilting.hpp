//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file perpsim/tilting.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <vector>

#include "model.hpp"
#include "rng.hpp"
#include "spectral.hpp"

namespace perpsim
{
//---------------------------------------------------------------------------//
/*!
 * One transition of (X, gamma, lambda).
 *
 * log_lr is the log of the nominal-over-sampling density of this step; it is
 * exactly zero for nominal steps.
 */
struct StepSample
{
    StateIndex next_state = 0;
    double gamma = 0;
    double reward = 0;
    double log_lr = 0;
};

//---------------------------------------------------------------------------//
// Draw an index from a cumulative probability row
inline StateIndex sample_row(RngStream& rng, std::vector<double> const& cum)
{
    if (cum.size() == 1)
    {
        return 0;
    }
    double const u = rng.uniform();
    StateIndex j = 0;
    while (j + 1 < cum.size() && !(u < cum[j]))
    {
        ++j;
    }
    return j;
}

// Increment drawn from its nominal law
double sample_increment(RngStream& rng, IncrementFamily const& family);

// Increment drawn from the law exp(theta z - chi(theta)) P(gamma in dz)
double sample_tilted_increment(RngStream& rng,
                               IncrementFamily const& family,
                               double theta);

double sample_reward(RngStream& rng, RewardFamily const& family);

StepSample nominal_step(RngStream& rng, Model const& model, StateIndex x);

StepSample tilted_step(RngStream& rng,
                       TiltEnvelope const& env,
                       Model const& model,
                       StateIndex x);

// d chi(x, theta) / d theta, which is the mean of the tilted increment
double tilted_increment_mean(Model const& model, StateIndex x, double theta);

}  // namespace perpsim
