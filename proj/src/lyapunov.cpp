//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file lyapunov.cpp
//---------------------------------------------------------------------------//
#include "perpsim/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "perpsim/error.hpp"
#include "perpsim/tilting.hpp"

namespace perpsim
{
namespace
{
constexpr int kCurvatureGrid = 200;
constexpr double kSmallestDelta = 1e-300;

std::string sci(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

double rho_of(double delta)
{
    return 1.0 / std::log(1.0 / delta);
}
}  // namespace

char const* to_string(Region r) noexcept
{
    switch (r)
    {
        case Region::tilt:
            return "tilt";
        case Region::nominal:
            return "nominal";
        case Region::terminal:
            return "terminal";
    }
    return "?";
}

//---------------------------------------------------------------------------//
DriftConstants drift_constants(Model const& model, TiltEnvelope const& env)
{
    double const ts = env.theta_star;
    std::size_t const n = model.num_states();
    DriftConstants k;
    // Every u_theta is normalized with min_x u_theta(x) = 1
    k.b0 = 1.0;
    k.b1 = psi_second_sup(model, ts, kCurvatureGrid);

    bool all_constant = true;
    for (StateIndex y = 0; y < n; ++y)
    {
        all_constant = all_constant && is_constant(model.reward(y));
    }
    std::vector<double> exp_chi(n);
    for (StateIndex y = 0; y < n; ++y)
    {
        exp_chi[y] = std::exp(model.cgf(y, ts));
    }

    if (all_constant)
    {
        // max{sup_x lambda(x)^{2 theta*}, 1} * sup_x E_x exp(chi(X1, theta*))
        double lam = 1.0;
        for (StateIndex y = 0; y < n; ++y)
        {
            lam = std::max(lam, reward_moment(model.reward(y), 2 * ts));
        }
        double sup_mgf = 0;
        for (StateIndex x = 0; x < n; ++x)
        {
            double e = 0;
            for (StateIndex y = 0; y < n; ++y)
            {
                e += model.kernel()(x, y) * exp_chi[y];
            }
            sup_mgf = std::max(sup_mgf, e);
        }
        k.b2 = lam * sup_mgf;
        k.b2_rule = "constant-reward closed form";
    }
    else
    {
        // lambda and gamma are independent given X1; log-moments are convex,
        // so the sup over the exponent range sits at an endpoint.
        double sup = 0;
        for (StateIndex x = 0; x < n; ++x)
        {
            double e = 0;
            for (StateIndex y = 0; y < n; ++y)
            {
                double const lam
                    = std::max(reward_moment(model.reward(y), ts),
                               reward_moment(model.reward(y), 2 * ts));
                e += model.kernel()(x, y) * lam * std::max(1.0, exp_chi[y]);
            }
            sup = std::max(sup, e);
        }
        k.b2 = sup;
        k.b2_rule = "endpoint moment bound";
    }

    k.big_b1 = 0.45 * env.mu / (2 * ts);
    k.big_b2 = std::max(std::pow(k.b0 * k.b2 / (0.45 * env.mu), 1.0 / ts),
                        1.0);
    return k;
}

double drift_budget(DriftConstants const& k,
                    TiltEnvelope const& env,
                    double delta)
{
    double const rho = rho_of(delta);
    double const expo = 2 * env.theta_star - rho;
    if (!(k.big_b1 * rho < 1))
    {
        return std::numeric_limits<double>::infinity();
    }
    return k.b0 * k.b2 * rho / std::pow(k.big_b2, expo)
           + (1 - rho * env.mu + k.b1 * rho * rho)
                 / std::pow(1 - k.big_b1 * rho, expo);
}

namespace
{
double largest_admissible(DriftConstants const& k, TiltEnvelope const& env)
{
    // rho < theta*  <=>  delta < exp(-1/theta*)
    double hi = -1.0 / env.theta_star - 1e-9;
    double lo = std::log(kSmallestDelta);
    auto ok = [&](double log_delta) {
        return drift_budget(k, env, std::exp(log_delta)) <= 1.0;
    };
    if (ok(hi))
    {
        return std::exp(hi);
    }
    if (!ok(lo))
    {
        return 0.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i)
    {
        double const mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return std::exp(lo);
}
}  // namespace

double largest_admissible_delta(Model const& model, TiltEnvelope const& env)
{
    return largest_admissible(drift_constants(model, env), env);
}

//---------------------------------------------------------------------------//
LyapunovParams select_params(Model const& model,
                             TiltEnvelope const& env,
                             double delta,
                             BudgetPolicy policy)
{
    if (!(delta > 0 && delta < 1))
    {
        throw InvalidArgument("delta must be in (0,1)");
    }
    auto const k = drift_constants(model, env);
    double const rho = rho_of(delta);
    if (!(rho < env.theta_star) || !(k.big_b1 * rho < 1))
    {
        throw LyapunovRefusal("delta = " + sci(delta)
                                  + " is too large for the state-dependent "
                                    "sampler (need rho < theta* and "
                                    "B1 rho < 1)",
                              std::numeric_limits<double>::infinity(),
                              largest_admissible(k, env));
    }

    LyapunovParams p;
    p.delta = delta;
    p.theta_star = env.theta_star;
    p.mu = env.mu;
    p.rho = rho;
    p.exponent = 2 * env.theta_star - rho;
    p.b0 = k.b0;
    p.b1 = k.b1;
    p.b2 = k.b2;
    p.big_b1 = k.big_b1;
    p.big_b2 = k.big_b2;
    p.b2_rule = k.b2_rule;
    p.c_delta = (k.big_b2 / k.big_b1) * std::pow(rho, -(1 + 1 / p.exponent));
    p.budget = drift_budget(k, env, delta);
    p.guaranteed = p.budget <= 1.0;
    if (!p.guaranteed && policy == BudgetPolicy::enforce)
    {
        double const largest = largest_admissible(k, env);
        throw LyapunovRefusal("delta too large for guaranteed efficiency "
                              "(drift budget "
                                  + sci(p.budget)
                                  + " > 1; largest admissible delta is "
                                  + sci(largest) + "); use SI or crude",
                              p.budget,
                              largest);
    }

    p.u_star = env.u_star;
    p.u_shift = solve_tilt(model, env.theta_star - rho).eigvec;
    std::size_t const n = model.num_states();
    p.log_u_product.resize(n);
    p.threshold.resize(n);
    p.m = std::numeric_limits<double>::infinity();
    p.big_m = 0;
    for (StateIndex x = 0; x < n; ++x)
    {
        p.log_u_product[x] = std::log(p.u_star[x]) + std::log(p.u_shift[x]);
        double const root = std::exp(p.log_u_product[x] / p.exponent);
        p.m = std::min(p.m, root);
        p.big_m = std::max(p.big_m, root);
        p.threshold[x] = p.c_delta * delta * root;
    }
    return p;
}

//---------------------------------------------------------------------------//
double log_h_value(LyapunovParams const& p, double s, double d, StateIndex x)
{
    if (!(d < 1))
    {
        return 0.0;
    }
    double const log_h
        = p.exponent
              * (std::log(p.c_delta * p.delta) + s - std::log1p(-d))
          + p.log_u_product[x];
    return std::min(log_h, 0.0);
}

double h_value(LyapunovParams const& p, double s, double d, StateIndex x)
{
    return std::exp(log_h_value(p, s, d, x));
}

Region classify(LyapunovParams const& p, StateIndex x, double z)
{
    if (z <= 0)
    {
        return Region::terminal;
    }
    return z > p.threshold[x] ? Region::tilt : Region::nominal;
}

//---------------------------------------------------------------------------//
std::vector<DriftProbe>
random_probes(RngStream& rng, LyapunovParams const& p, std::size_t count)
{
    std::size_t const n = p.threshold.size();
    std::vector<DriftProbe> out(count);
    for (auto& probe : out)
    {
        probe.x = std::min(static_cast<StateIndex>(rng.uniform() * n), n - 1);
        probe.d = 0.99 * rng.uniform();
        double const log_z = std::log(p.threshold[probe.x])
                             + 10 * rng.uniform();
        probe.s = std::log1p(-probe.d) - log_z;
    }
    return out;
}

//---------------------------------------------------------------------------//
DriftEstimate verify_drift(RngStream& rng,
                           Model const& model,
                           TiltEnvelope const& env,
                           LyapunovParams const& p,
                           DriftProbe const& probe,
                           std::size_t n)
{
    if (n < 100000)
    {
        throw InvalidArgument("verify_drift needs at least 1e5 samples");
    }
    if (probe.x >= model.num_states() || !(probe.d < 1))
    {
        throw InvalidArgument("drift probe is outside the tilt region");
    }
    double const log_h0 = log_h_value(p, probe.s, probe.d, probe.x);
    if (!(log_h0 < 0))
    {
        throw InvalidArgument("drift probe is outside the tilt region");
    }

    double mean = 0;
    double m2 = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        auto const step = nominal_step(rng, model, probe.x);
        double const s1 = probe.s + step.gamma;
        double const d1 = probe.d + p.delta * step.reward * std::exp(s1);
        double const log_r = env.log_u_star[probe.x]
                             - env.log_u_star[step.next_state]
                             - env.theta_star * step.gamma;
        double const term = std::exp(
            log_r + log_h_value(p, s1, d1, step.next_state) - log_h0);
        double const delta = term - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (term - mean);
    }
    DriftEstimate est;
    est.samples = n;
    est.ratio = mean;
    est.std_err = std::sqrt(m2 / static_cast<double>(n - 1)
                            / static_cast<double>(n));
    est.pass = est.ratio <= 1 + 3 * est.std_err;
    return est;
}

}  // namespace perpsim
