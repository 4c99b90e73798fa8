//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file perpsim/model.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "matrix.hpp"

namespace perpsim
{
using StateIndex = std::size_t;

//---------------------------------------------------------------------------//
// INCREMENT AND REWARD FAMILIES
//---------------------------------------------------------------------------//
//! gamma = log(scale) + log(W) with W chi-square with one degree of freedom
struct LogChiSquareIncrement
{
    double scale;
};

//! gamma ~ Normal(mean, stddev^2); stddev = 0 encodes a constant increment
struct NormalIncrement
{
    double mean;
    double stddev;
};

using IncrementFamily = std::variant<LogChiSquareIncrement, NormalIncrement>;

//! lambda = value almost surely
struct ConstantReward
{
    double value;
};

//! lambda = exp(log_mean + log_sd * N(0,1))
struct LognormalReward
{
    double log_mean;
    double log_sd;
};

using RewardFamily = std::variant<ConstantReward, LognormalReward>;

//! Open interval of theta on which the CGF is finite
struct CgfDomain
{
    double lower;
    double upper;

    bool contains(double theta) const noexcept
    {
        return theta > lower && theta < upper;
    }
};

CgfDomain cgf_domain(IncrementFamily const& family) noexcept;

// log E exp(theta * gamma); throws DomainError outside cgf_domain
double cgf(IncrementFamily const& family, double theta);

// d/dtheta of cgf, the mean of the tilted increment
double cgf_derivative(IncrementFamily const& family, double theta);

// E lambda^order for order > 0
double reward_moment(RewardFamily const& family, double order);

bool is_constant(RewardFamily const& family) noexcept;

std::string describe(IncrementFamily const& family);
std::string describe(RewardFamily const& family);

//---------------------------------------------------------------------------//
/*!
 * Unvalidated description of a Markov-modulated perpetuity.
 *
 * States are indexed from zero. The increment and reward laws of a
 * transition are those of the destination state.
 */
struct ModelDefinition
{
    std::string name;
    Matrix kernel;
    std::vector<IncrementFamily> increments;
    std::vector<RewardFamily> rewards;
    StateIndex initial_state = 0;
};

// Human-readable list of violated model assumptions; empty if valid
std::vector<std::string> validate(ModelDefinition const& def);

//---------------------------------------------------------------------------//
/*!
 * Validated, immutable perpetuity model.
 *
 * Construction throws InvalidArgument listing every violation reported by
 * validate(). Instances are safe to share between threads.
 */
class Model
{
  public:
    explicit Model(ModelDefinition def);

    std::string const& name() const noexcept { return def_.name; }
    std::size_t num_states() const noexcept { return def_.kernel.size(); }
    Matrix const& kernel() const noexcept { return def_.kernel; }
    StateIndex initial_state() const noexcept { return def_.initial_state; }
    ModelDefinition const& definition() const noexcept { return def_; }

    IncrementFamily const& increment(StateIndex x) const
    {
        return def_.increments[x];
    }
    RewardFamily const& reward(StateIndex x) const { return def_.rewards[x]; }

    //! Intersection of the CGF domains of all states
    CgfDomain cgf_domain() const noexcept { return domain_; }

    //! chi(x, theta)
    double cgf(StateIndex x, double theta) const
    {
        return perpsim::cgf(def_.increments[x], theta);
    }

    //! Cumulative transition probabilities of row x (last entry exactly 1)
    std::vector<double> const& cumulative_row(StateIndex x) const
    {
        return cumulative_[x];
    }

  private:
    ModelDefinition def_;
    CgfDomain domain_;
    std::vector<std::vector<double>> cumulative_;
};

// Cumulative sums of a probability row, renormalized so the last entry is 1
std::vector<double> cumulative_probabilities(std::span<double const> row);

//---------------------------------------------------------------------------//
// SHIPPED MODELS
//---------------------------------------------------------------------------//
// Stationary ARCH(1) recast as a perpetuity: reward alpha0, increment
// log(alpha1) + log chi^2.
Model make_arch1(double alpha0, double alpha1);

// Two-state Markov-modulated perpetuity of the numerical study.
Model make_two_state_demo();

// Single-state perpetuity with Normal(mean, stddev^2) increments and a
// constant reward: a discretized Brownian perpetuity.
Model make_normal_walk(double mean, double stddev, double reward = 1.0);

}  // namespace perpsim
