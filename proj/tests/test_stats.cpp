//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file test_stats.cpp
//---------------------------------------------------------------------------//
#include <cmath>
#include <numeric>

#include <catch_amalgamated.hpp>

#include "perpsim/estimators.hpp"
#include "perpsim/rng.hpp"
#include "perpsim/stats.hpp"

using namespace perpsim;

namespace
{
bool close(double a, double b, double rel = 1e-12)
{
    return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}
}  // namespace

TEST_CASE("two-pass reference values")
{
    std::vector<double> const xs{0.0, 1.5, 2.0, 0.0, 7.25, 3.0};
    SummaryStats s;
    for (double x : xs)
        s.add(x);
    double const mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double ss = 0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    CHECK(s.n == xs.size());
    CHECK(close(s.mean, mean));
    CHECK(close(s.variance(), ss / (xs.size() - 1)));
    CHECK(close(s.std_err(), std::sqrt(ss / (xs.size() - 1) / xs.size())));
    CHECK(close(*s.cv(), std::sqrt(ss / (xs.size() - 1)) / mean));
    CHECK(close(s.ci_lo(), mean - 1.96 * s.std_err()));
    CHECK(close(s.ci_hi(), mean + 1.96 * s.std_err()));
}

TEST_CASE("cv is undefined for a zero mean")
{
    SummaryStats s;
    for (int i = 0; i < 10; ++i)
        s.add(0.0);
    CHECK_FALSE(s.cv().has_value());
    CHECK(s.ci_lo() == 0);
}

TEST_CASE("merging random partitions")
{
    RngStream rng(1, 0);
    for (int trial = 0; trial < 50; ++trial)
    {
        std::vector<double> xs(1 + static_cast<int>(rng.uniform() * 2000));
        for (auto& x : xs)
            x = rng.uniform() < 0.9 ? 0.0 : std::exp(5 * rng.normal());
        SummaryStats single;
        for (double x : xs)
            single.add(x);

        // Random contiguous blocks, merged in random groupings
        std::vector<SummaryStats> parts(1);
        for (double x : xs)
        {
            if (rng.uniform() < 0.05)
                parts.emplace_back();
            parts.back().add(x);
        }
        SummaryStats left, right;
        std::size_t const split = static_cast<std::size_t>(rng.uniform()
                                                           * parts.size());
        for (std::size_t i = 0; i < parts.size(); ++i)
            (i < split ? left : right).merge(parts[i]);
        SummaryStats ab = left;
        ab.merge(right);
        SummaryStats ba = right;
        ba.merge(left);

        CHECK(ab.n == single.n);
        CHECK(close(ab.mean, single.mean));
        CHECK(close(ab.m2, single.m2, 1e-10));
        CHECK(close(ab.mean, ba.mean));
        CHECK(close(ab.m2, ba.m2));
    }
}

TEST_CASE("step bookkeeping")
{
    SummaryStats a, b;
    a.add(ReplicationResult{1.0, 10, TerminationCause::hit, 0, 0});
    a.add(ReplicationResult{0.0, 30, TerminationCause::capped, 0, 0});
    b.add(ReplicationResult{0.5, 5, TerminationCause::truncated, 0, 0});
    a.merge(b);
    CHECK(a.n == 3);
    CHECK(a.mean_steps() == 15);
    CHECK(a.max_steps == 30);
    CHECK(a.capped_count == 1);
    SummaryStats empty;
    a.merge(empty);
    CHECK(a.n == 3);
    empty.merge(a);
    CHECK(empty.mean == a.mean);
}
