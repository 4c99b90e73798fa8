//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file stats.cpp
//---------------------------------------------------------------------------//
#include "perpsim/stats.hpp"

#include <algorithm>
#include <cmath>

#include "perpsim/estimators.hpp"

namespace perpsim
{
namespace
{
constexpr double kZ95 = 1.96;
}

void SummaryStats::add(double value)
{
    ++n;
    double const delta = value - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (value - mean);
}

void SummaryStats::add(ReplicationResult const& r)
{
    this->add(r.value);
    sum_steps += static_cast<double>(r.steps);
    max_steps = std::max(max_steps, r.steps);
    if (r.cause == TerminationCause::capped)
    {
        ++capped_count;
    }
}

void SummaryStats::merge(SummaryStats const& other)
{
    if (other.n == 0)
    {
        return;
    }
    if (n == 0)
    {
        *this = other;
        return;
    }
    double const na = static_cast<double>(n);
    double const nb = static_cast<double>(other.n);
    double const total = na + nb;
    double const delta = other.mean - mean;
    mean += delta * nb / total;
    m2 += other.m2 + delta * delta * na * nb / total;
    n += other.n;
    sum_steps += other.sum_steps;
    max_steps = std::max(max_steps, other.max_steps);
    capped_count += other.capped_count;
}

double SummaryStats::variance() const
{
    return n < 2 ? 0.0 : m2 / static_cast<double>(n - 1);
}

double SummaryStats::std_dev() const
{
    return std::sqrt(this->variance());
}

double SummaryStats::std_err() const
{
    return n == 0 ? 0.0 : this->std_dev() / std::sqrt(static_cast<double>(n));
}

std::optional<double> SummaryStats::cv() const
{
    if (mean == 0)
    {
        return std::nullopt;
    }
    return this->std_dev() / mean;
}

double SummaryStats::ci_lo() const
{
    return mean - kZ95 * this->std_err();
}

double SummaryStats::ci_hi() const
{
    return mean + kZ95 * this->std_err();
}

double SummaryStats::mean_steps() const
{
    return n == 0 ? 0.0 : sum_steps / static_cast<double>(n);
}

}  // namespace perpsim
