//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file perpsim/stats.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <optional>

namespace perpsim
{
struct ReplicationResult;

//---------------------------------------------------------------------------//
/*!
 * Streaming mean/variance (Welford) with step bookkeeping.
 *
 * merge() uses the pairwise update of Chan et al., so partial accumulators
 * from independent chunks can be combined in any grouping.
 */
struct SummaryStats
{
    std::uint64_t n = 0;
    double mean = 0;
    double m2 = 0;
    double sum_steps = 0;
    std::uint64_t max_steps = 0;
    std::uint64_t capped_count = 0;

    void add(double value);
    void add(ReplicationResult const& r);
    void merge(SummaryStats const& other);

    //! Sample variance (n - 1 denominator); 0 when n < 2
    double variance() const;
    double std_dev() const;
    double std_err() const;
    //! std / mean, undefined when the mean is zero
    std::optional<double> cv() const;
    double ci_lo() const;
    double ci_hi() const;
    double mean_steps() const;
};

}  // namespace perpsim
