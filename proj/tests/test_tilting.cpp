//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file test_tilting.cpp
//---------------------------------------------------------------------------//
#include <cmath>

#include <boost/math/special_functions/digamma.hpp>
#include <catch_amalgamated.hpp>

#include "perpsim/rng.hpp"
#include "perpsim/spectral.hpp"
#include "perpsim/tilting.hpp"

using namespace perpsim;

namespace
{
struct Moments
{
    double sum = 0, sum2 = 0;
    long n = 0;
    void add(double v)
    {
        sum += v;
        sum2 += v * v;
        ++n;
    }
    double mean() const { return sum / n; }
    double se() const
    {
        return std::sqrt((sum2 / n - mean() * mean()) / n);
    }
};

// E log W for W chi-square(1)
double const kElogChisq = boost::math::digamma(0.5) + std::log(2.0);

Model three_state()
{
    ModelDefinition d;
    d.kernel = Matrix{{0.2, 0.3, 0.5}, {0.6, 0, 0.4}, {0.1, 0.8, 0.1}};
    d.increments = {NormalIncrement{-0.9, 0.7},
                    LogChiSquareIncrement{0.4},
                    NormalIncrement{-0.2, 0.3}};
    d.rewards = {ConstantReward{1}, LognormalReward{0, 0.5}, ConstantReward{0}};
    return Model(d);
}
}  // namespace

TEST_CASE("nominal steps")
{
    auto const arch = make_arch1(1, 0.75);
    RngStream rng(1, 0);
    Moments g;
    for (int i = 0; i < 1000000; ++i)
    {
        auto const s = nominal_step(rng, arch, 0);
        REQUIRE(s.next_state == 0);
        REQUIRE(s.log_lr == 0);
        REQUIRE(s.reward == 1);
        g.add(s.gamma);
    }
    CHECK(kElogChisq == Catch::Approx(-1.2703628454614782).epsilon(1e-12));
    CHECK(std::abs(g.mean() - (std::log(0.75) + kElogChisq)) <= 4 * g.se());

    auto const two = make_two_state_demo();
    for (int i = 0; i < 1000; ++i)
        CHECK(nominal_step(rng, two, 1).next_state == 0);

    auto const m = three_state();
    for (int i = 0; i < 1000; ++i)
        CHECK(nominal_step(rng, m, 0).reward >= 0);
}

TEST_CASE("tilted increments")
{
    for (double th : {0.3, 1.456, 2.5})
    {
        RngStream rng(2, static_cast<std::uint64_t>(th * 1000));
        Moments g;
        for (int i = 0; i < 1000000; ++i)
            g.add(sample_tilted_increment(rng, LogChiSquareIncrement{0.75}, th));
        double const expect = std::log(0.75) + boost::math::digamma(th + 0.5)
                              + std::log(2.0);
        CHECK(std::abs(g.mean() - expect) <= 4 * g.se());

        Moments n;
        for (int i = 0; i < 1000000; ++i)
            n.add(sample_tilted_increment(rng, NormalIncrement{-1, 0.5}, th));
        CHECK(std::abs(n.mean() - (-1 + th * 0.25)) <= 4 * n.se());
        double const var = n.sum2 / n.n - n.mean() * n.mean();
        CHECK(var == Catch::Approx(0.25).epsilon(0.01));
    }
}

TEST_CASE("tilted increment mean")
{
    auto const arch = make_arch1(1, 0.75);
    for (double th : {0.0, 0.5, 1.456, 3.0})
    {
        double const expect = std::log(0.75) + boost::math::digamma(th + 0.5)
                              + std::log(2.0);
        CHECK(tilted_increment_mean(arch, 0, th)
              == Catch::Approx(expect).margin(1e-6));
    }
    // Near the edge of the domain
    CHECK(tilted_increment_mean(arch, 0, -0.4999)
          == Catch::Approx(std::log(1.5) + boost::math::digamma(1e-4))
                 .epsilon(1e-4));
    auto const n = make_normal_walk(-1, 2);
    CHECK(tilted_increment_mean(n, 0, 0.7)
          == Catch::Approx(-1 + 0.7 * 4).epsilon(1e-8));
    CHECK(tilted_increment_mean(n, 0, 0) == Catch::Approx(-1).epsilon(1e-8));
}

TEST_CASE("likelihood ratio has unit mean under tilting")
{
    // All-normal increments keep the ratio square integrable
    ModelDefinition d;
    d.kernel = Matrix{{0.2, 0.3, 0.5}, {0.6, 0, 0.4}, {0.1, 0.8, 0.1}};
    d.increments = {NormalIncrement{-0.9, 0.7},
                    NormalIncrement{-0.4, 0.5},
                    NormalIncrement{-0.2, 0.3}};
    d.rewards = {ConstantReward{1}, ConstantReward{1}, ConstantReward{1}};
    for (auto const& m : {Model(d), make_normal_walk(-1, 1)})
    {
        auto const env = find_theta_star(m);
        for (StateIndex x = 0; x < m.num_states(); ++x)
        {
            RngStream rng(3, x);
            Moments lr;
            for (int i = 0; i < 1000000; ++i)
                lr.add(std::exp(tilted_step(rng, env, m, x).log_lr));
            CAPTURE(m.name(), x);
            CHECK(std::abs(lr.mean() - 1) <= 4 * lr.se());
        }
    }
}

// With log-chi-square increments and theta* > 1/2 the ratio has infinite
// variance (tail index 1 + 1/(2 theta*)), so compare expectations of
// functions that vanish for very negative increments instead.
TEST_CASE("change of measure reproduces nominal expectations")
{
    for (auto const& m : {three_state(), make_two_state_demo()})
    {
        auto const env = find_theta_star(m);
        int const n = 1000000;
        for (StateIndex x = 0; x < m.num_states(); ++x)
        {
            RngStream tr(4, x), nr(5, x);
            Moments t_ind, n_ind, t_sq, n_sq;
            for (int i = 0; i < n; ++i)
            {
                auto const t = tilted_step(tr, env, m, x);
                double const w = t.gamma > -3 ? std::exp(t.log_lr) : 0.0;
                t_ind.add(w * (t.next_state == 1));
                t_sq.add(w * t.gamma * t.gamma);
                auto const s = nominal_step(nr, m, x);
                bool const keep = s.gamma > -3;
                n_ind.add(keep && s.next_state == 1);
                n_sq.add(keep ? s.gamma * s.gamma : 0.0);
            }
            CAPTURE(m.name(), x);
            CHECK(std::abs(t_ind.mean() - n_ind.mean())
                  <= 4 * std::hypot(t_ind.se(), n_ind.se()));
            CHECK(std::abs(t_sq.mean() - n_sq.mean())
                  <= 4 * std::hypot(t_sq.se(), n_sq.se()));
        }
    }
}

TEST_CASE("tilted cumulative rows end at one")
{
    auto const env = find_theta_star(three_state());
    for (auto const& row : env.tilted_cumulative)
        CHECK(row.back() == 1.0);
}
