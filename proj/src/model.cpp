//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file model.cpp
//---------------------------------------------------------------------------//
#include "perpsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "perpsim/error.hpp"

namespace perpsim
{
namespace
{
template<class... Ts>
struct Overloaded : Ts...
{
    using Ts::operator()...;
};

constexpr double kRowSumTol = 1e-12;

std::string state_label(StateIndex x)
{
    return "state " + std::to_string(x);
}

std::string format_number(double v)
{
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

// Recurrence up to x >= 10, then the asymptotic series
double digamma(double x)
{
    double acc = 0;
    while (x < 10)
    {
        acc -= 1 / x;
        x += 1;
    }
    double const r = 1 / (x * x);
    return acc + std::log(x) - 0.5 / x
           - r
                 * (1.0 / 12
                    - r * (1.0 / 120 - r * (1.0 / 252 - r * (1.0 / 240 - r / 132))));
}
}  // namespace

//---------------------------------------------------------------------------//
CgfDomain cgf_domain(IncrementFamily const& family) noexcept
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(
        Overloaded{
            [](LogChiSquareIncrement const&) { return CgfDomain{-0.5, inf}; },
            [](NormalIncrement const&) { return CgfDomain{-inf, inf}; }},
        family);
}

double cgf(IncrementFamily const& family, double theta)
{
    if (!cgf_domain(family).contains(theta))
    {
        throw DomainError("cgf evaluated outside its domain at theta = "
                          + format_number(theta) + " for "
                          + describe(family));
    }
    return std::visit(
        Overloaded{[theta](LogChiSquareIncrement const& f) {
                       // E W^theta = 2^theta Gamma(theta + 1/2) / Gamma(1/2)
                       static double const lgamma_half
                           = std::lgamma(0.5);
                       return theta * std::log(2.0 * f.scale)
                              + std::lgamma(theta + 0.5) - lgamma_half;
                   },
                   [theta](NormalIncrement const& f) {
                       return theta * f.mean
                              + 0.5 * f.stddev * f.stddev * theta * theta;
                   }},
        family);
}

double cgf_derivative(IncrementFamily const& family, double theta)
{
    if (!cgf_domain(family).contains(theta))
    {
        throw DomainError("cgf derivative evaluated outside its domain at "
                          "theta = "
                          + format_number(theta) + " for " + describe(family));
    }
    return std::visit(
        Overloaded{[theta](LogChiSquareIncrement const& f) {
                       return std::log(2.0 * f.scale) + digamma(theta + 0.5);
                   },
                   [theta](NormalIncrement const& f) {
                       return f.mean + f.stddev * f.stddev * theta;
                   }},
        family);
}

double reward_moment(RewardFamily const& family, double order)
{
    if (!(order > 0))
    {
        throw InvalidArgument("reward moment order must be positive");
    }
    return std::visit(
        Overloaded{[order](ConstantReward const& r) {
                       return std::pow(r.value, order);
                   },
                   [order](LognormalReward const& r) {
                       return std::exp(order * r.log_mean
                                       + 0.5 * order * order * r.log_sd
                                             * r.log_sd);
                   }},
        family);
}

bool is_constant(RewardFamily const& family) noexcept
{
    return std::holds_alternative<ConstantReward>(family);
}

std::string describe(IncrementFamily const& family)
{
    return std::visit(
        Overloaded{[](LogChiSquareIncrement const& f) {
                       return "logchisq(" + format_number(f.scale) + ")";
                   },
                   [](NormalIncrement const& f) {
                       return "normal(" + format_number(f.mean) + ","
                              + format_number(f.stddev) + ")";
                   }},
        family);
}

std::string describe(RewardFamily const& family)
{
    return std::visit(
        Overloaded{[](ConstantReward const& r) {
                       return "const(" + format_number(r.value) + ")";
                   },
                   [](LognormalReward const& r) {
                       return "lognormal(" + format_number(r.log_mean) + ","
                              + format_number(r.log_sd) + ")";
                   }},
        family);
}

//---------------------------------------------------------------------------//
std::vector<std::string> validate(ModelDefinition const& def)
{
    std::vector<std::string> violations;
    std::size_t const n = def.kernel.size();
    if (n == 0)
    {
        violations.emplace_back("state space is empty");
        return violations;
    }
    if (def.increments.size() != n)
    {
        violations.push_back("expected " + std::to_string(n)
                             + " increment families, got "
                             + std::to_string(def.increments.size()));
    }
    if (def.rewards.size() != n)
    {
        violations.push_back("expected " + std::to_string(n)
                             + " reward families, got "
                             + std::to_string(def.rewards.size()));
    }
    if (def.initial_state >= n)
    {
        violations.push_back("initial state "
                             + std::to_string(def.initial_state)
                             + " is out of range");
    }

    bool stochastic = true;
    for (std::size_t i = 0; i < n; ++i)
    {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j)
        {
            double const k = def.kernel(i, j);
            if (!(k >= 0) || !std::isfinite(k))
            {
                violations.push_back("row " + std::to_string(i)
                                     + " has an invalid entry "
                                     + format_number(k));
                stochastic = false;
            }
            sum += k;
        }
        if (std::fabs(sum - 1.0) > kRowSumTol)
        {
            violations.push_back("row " + std::to_string(i) + " sums to "
                                 + format_number(sum));
            stochastic = false;
        }
    }
    if (stochastic && !is_irreducible(def.kernel))
    {
        violations.emplace_back("kernel is not irreducible");
    }

    for (std::size_t x = 0; x < def.increments.size(); ++x)
    {
        std::visit(Overloaded{[&](LogChiSquareIncrement const& f) {
                                  if (!(f.scale > 0) || !std::isfinite(f.scale))
                                  {
                                      violations.push_back(
                                          state_label(x)
                                          + ": log-chi-square scale must be "
                                            "positive");
                                  }
                              },
                              [&](NormalIncrement const& f) {
                                  if (!std::isfinite(f.mean)
                                      || !std::isfinite(f.stddev)
                                      || f.stddev < 0)
                                  {
                                      violations.push_back(
                                          state_label(x)
                                          + ": invalid normal parameters");
                                  }
                                  else if (f.stddev == 0)
                                  {
                                      violations.push_back(
                                          state_label(x)
                                          + ": degenerate increment");
                                  }
                              }},
                   def.increments[x]);
    }
    for (std::size_t x = 0; x < def.rewards.size(); ++x)
    {
        std::visit(Overloaded{[&](ConstantReward const& r) {
                                  if (!(r.value >= 0) || !std::isfinite(r.value))
                                  {
                                      violations.push_back(
                                          state_label(x)
                                          + ": reward must be non-negative");
                                  }
                              },
                              [&](LognormalReward const& r) {
                                  if (!std::isfinite(r.log_mean)
                                      || !std::isfinite(r.log_sd)
                                      || r.log_sd < 0)
                                  {
                                      violations.push_back(
                                          state_label(x)
                                          + ": invalid lognormal parameters");
                                  }
                              }},
                   def.rewards[x]);
    }
    return violations;
}

//---------------------------------------------------------------------------//
std::vector<double> cumulative_probabilities(std::span<double const> row)
{
    std::vector<double> cum(row.size());
    double total = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j)
    {
        total += row[j];
        cum[j] = total;
    }
    for (double& c : cum)
    {
        c /= total;
    }
    // Trailing zero-probability states must never be selected
    auto last_positive = row.size();
    while (last_positive > 0 && row[last_positive - 1] <= 0)
    {
        --last_positive;
    }
    for (std::size_t j = last_positive == 0 ? 0 : last_positive - 1;
         j < cum.size();
         ++j)
    {
        cum[j] = 1.0;
    }
    return cum;
}

Model::Model(ModelDefinition def) : def_(std::move(def))
{
    auto const violations = validate(def_);
    if (!violations.empty())
    {
        std::string msg = "invalid model";
        if (!def_.name.empty())
        {
            msg += " '" + def_.name + "'";
        }
        for (auto const& v : violations)
        {
            msg += "; " + v;
        }
        throw InvalidArgument(msg);
    }

    domain_ = {-std::numeric_limits<double>::infinity(),
               std::numeric_limits<double>::infinity()};
    for (auto const& inc : def_.increments)
    {
        auto const d = perpsim::cgf_domain(inc);
        domain_.lower = std::max(domain_.lower, d.lower);
        domain_.upper = std::min(domain_.upper, d.upper);
    }
    cumulative_.reserve(num_states());
    for (StateIndex x = 0; x < num_states(); ++x)
    {
        cumulative_.push_back(cumulative_probabilities(def_.kernel.row(x)));
    }
}

//---------------------------------------------------------------------------//
Model make_arch1(double alpha0, double alpha1)
{
    if (!(alpha0 > 0) || !std::isfinite(alpha0))
    {
        throw InvalidArgument("parameter out of range: alpha0 must be > 0");
    }
    if (!(alpha1 > 0 && alpha1 < 1))
    {
        throw InvalidArgument(
            "parameter out of range: alpha1 must lie in (0, 1)");
    }
    ModelDefinition def;
    def.name = "arch1(" + format_number(alpha0) + "," + format_number(alpha1)
               + ")";
    def.kernel = Matrix{{1.0}};
    def.increments = {LogChiSquareIncrement{alpha1}};
    def.rewards = {ConstantReward{alpha0}};
    return Model(std::move(def));
}

Model make_two_state_demo()
{
    ModelDefinition def;
    def.name = "two_state";
    def.kernel = Matrix{{0.5, 0.5}, {1.0, 0.0}};
    def.increments
        = {LogChiSquareIncrement{2.0 / 3.0}, LogChiSquareIncrement{0.75}};
    def.rewards = {ConstantReward{1.0}, ConstantReward{2.0}};
    def.initial_state = 0;
    return Model(std::move(def));
}

Model make_normal_walk(double mean, double stddev, double reward)
{
    ModelDefinition def;
    def.name = "normal(" + format_number(mean) + "," + format_number(stddev)
               + ")";
    def.kernel = Matrix{{1.0}};
    def.increments = {NormalIncrement{mean, stddev}};
    def.rewards = {ConstantReward{reward}};
    return Model(std::move(def));
}

}  // namespace perpsim
