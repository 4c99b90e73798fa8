//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file perpsim/lyapunov.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "model.hpp"
#include "rng.hpp"
#include "spectral.hpp"

namespace perpsim
{
//---------------------------------------------------------------------------//
//! Where the state-dependent sampler is, in (X, Z) coordinates.
enum class Region
{
    tilt,  //!< Z above the state threshold: sample from the tilted law
    nominal,  //!< 0 < Z <= threshold: sample from the nominal law
    terminal  //!< Z <= 0: the level has been crossed
};

char const* to_string(Region r) noexcept;

//! What to do when the drift-budget inequality fails at the requested scale
enum class BudgetPolicy
{
    enforce,  //!< refuse construction (throws LyapunovRefusal)
    report  //!< construct anyway and record guaranteed = false
};

//---------------------------------------------------------------------------//
/*!
 * Constants of the state-dependent sampler at one scale Delta.
 *
 * The Lyapunov function is
 *   h(s, d, x) = min{ (c Delta e^s / (1-d)_+)^k u*(x) u_shift(x), 1 },
 * with k = 2 theta* - rho, and the tilt region is {h < 1}; equivalently
 * Z = (1-d) e^{-s} > threshold(x) = c Delta (u*(x) u_shift(x))^{1/k}.
 */
struct LyapunovParams
{
    double delta = 0;
    double theta_star = 0;
    double mu = 0;
    double rho = 0;
    double exponent = 0;  //!< 2 theta* - rho
    double c_delta = 0;
    double b0 = 0;
    double b1 = 0;
    double b2 = 0;
    double big_b1 = 0;
    double big_b2 = 0;
    double m = 0;
    double big_m = 0;
    double budget = 0;  //!< left side of the drift-budget inequality
    bool guaranteed = false;  //!< budget <= 1
    std::string b2_rule;  //!< which bound produced b2
    std::vector<double> u_star;
    std::vector<double> u_shift;
    std::vector<double> log_u_product;  //!< log u*(x) + log u_shift(x)
    std::vector<double> threshold;  //!< tilt threshold on Z per state
};

// Constants b0, b1, b2, B1, B2 at theta* (independent of Delta)
struct DriftConstants
{
    double b0 = 1;
    double b1 = 0;
    double b2 = 0;
    double big_b1 = 0;
    double big_b2 = 0;
    std::string b2_rule;
};

DriftConstants drift_constants(Model const& model, TiltEnvelope const& env);

// Left-hand side of the drift-budget inequality at scale delta
double drift_budget(DriftConstants const& k,
                    TiltEnvelope const& env,
                    double delta);

// Largest delta in (0, e^{-1/theta*}) at which the budget is <= 1, found by
// bisection on log(delta); 0 if none was found down to 1e-300.
double largest_admissible_delta(Model const& model, TiltEnvelope const& env);

LyapunovParams select_params(Model const& model,
                             TiltEnvelope const& env,
                             double delta,
                             BudgetPolicy policy = BudgetPolicy::enforce);

double h_value(LyapunovParams const& p, double s, double d, StateIndex x);

// log h_value; -inf when h underflows
double log_h_value(LyapunovParams const& p, double s, double d, StateIndex x);

Region classify(LyapunovParams const& p, StateIndex x, double z);

//---------------------------------------------------------------------------//
//! A point (s, d, x) at which to test the Lyapunov inequality
struct DriftProbe
{
    double s = 0;
    double d = 0;
    StateIndex x = 0;
};

struct DriftEstimate
{
    double ratio = 0;  //!< estimate of E[r h(W1)] / h(w)
    double std_err = 0;
    std::size_t samples = 0;
    bool pass = false;  //!< ratio <= 1 + 3 std_err
};

// Random points of the tilt region: uniform state, d uniform on (0, 0.99),
// and log(Z / threshold) uniform on (0, 10)
std::vector<DriftProbe>
random_probes(RngStream& rng, LyapunovParams const& p, std::size_t count);

// Monte Carlo check of E_w[r(w, W1) h(W1)] <= h(w) under nominal sampling
DriftEstimate verify_drift(RngStream& rng,
                           Model const& model,
                           TiltEnvelope const& env,
                           LyapunovParams const& p,
                           DriftProbe const& probe,
                           std::size_t n);

}  // namespace perpsim
