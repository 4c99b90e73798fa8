//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file test_rng.cpp
//---------------------------------------------------------------------------//
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <catch_amalgamated.hpp>

#include "perpsim/rng.hpp"

using namespace perpsim;

namespace
{
// Kolmogorov-Smirnov statistic of a sample against a CDF
template<class Cdf>
double ks_stat(std::vector<double> xs, Cdf&& cdf)
{
    std::sort(xs.begin(), xs.end());
    double const n = static_cast<double>(xs.size());
    double d = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        double const f = cdf(xs[i]);
        d = std::max({d, f - i / n, (i + 1) / n - f});
    }
    return d;
}
}  // namespace

TEST_CASE("philox known answers")
{
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::apply(C{0, 0, 0, 0}, K{0, 0})
          == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::apply(C{~0u, ~0u, ~0u, ~0u}, K{~0u, ~0u})
          == C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::apply(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                            K{0xa4093822, 0x299f31d0})
          == C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct")
{
    RngStream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i)
    {
        auto const x = a.next_u64();
        CHECK(x == b.next_u64());
        seen.insert(x);
        seen.insert(c.next_u64());
        seen.insert(d.next_u64());
    }
    CHECK(seen.size() == 3000);
}

TEST_CASE("uniform stays inside the open interval")
{
    RngStream r(1, 0);
    double sum = 0, sum2 = 0;
    int const n = 200000;
    for (int i = 0; i < n; ++i)
    {
        double const u = r.uniform();
        REQUIRE(u > 0);
        REQUIRE(u < 1);
        sum += u;
        sum2 += u * u;
    }
    CHECK(sum / n == Catch::Approx(0.5).margin(0.003));
    CHECK(sum2 / n - (sum / n) * (sum / n)
          == Catch::Approx(1.0 / 12).margin(0.002));
}

TEST_CASE("normal matches the standard normal law")
{
    RngStream r(2, 0);
    std::vector<double> xs(100000);
    for (auto& x : xs)
    {
        x = r.normal();
    }
    boost::math::normal_distribution<> law;
    double const d = ks_stat(xs, [&](double x) { return cdf(law, x); });
    // 1.63 / sqrt(n) is the 1% critical value
    CHECK(d < 1.63 / std::sqrt(100000.0));
}

TEST_CASE("gamma matches its law for several shapes")
{
    for (double shape : {0.3, 0.5, 1.0, 1.956, 7.5})
    {
        CAPTURE(shape);
        RngStream r(3, static_cast<std::uint64_t>(shape * 1000));
        std::vector<double> xs(100000);
        for (auto& x : xs)
        {
            x = r.gamma(shape);
            REQUIRE(x > 0);
        }
        boost::math::gamma_distribution<> law(shape, 1.0);
        double const d = ks_stat(xs, [&](double x) { return cdf(law, x); });
        CHECK(d < 1.63 / std::sqrt(100000.0));
    }
}
