//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file matrix.cpp
//---------------------------------------------------------------------------//
#include "perpsim/matrix.hpp"

#include "perpsim/error.hpp"

namespace perpsim
{
namespace
{
// Forward reachability from `start` along positive entries (transposed when
// `reverse` is set).
std::vector<bool> reachable(Matrix const& a, std::size_t start, bool reverse)
{
    std::size_t const n = a.size();
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    while (!stack.empty())
    {
        std::size_t const i = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < n; ++j)
        {
            double const entry = reverse ? a(j, i) : a(i, j);
            if (entry > 0 && !seen[j])
            {
                seen[j] = true;
                stack.push_back(j);
            }
        }
    }
    return seen;
}
}  // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : n_(rows.size()), data_()
{
    data_.reserve(n_ * n_);
    for (auto const& r : rows)
    {
        if (r.size() != n_)
        {
            throw InvalidArgument("matrix rows must all have length "
                                  + std::to_string(n_));
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n)
{
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        m(i, i) = 1.0;
    }
    return m;
}

std::vector<double> multiply(Matrix const& a, std::span<double const> x)
{
    std::size_t const n = a.size();
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
    {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
        {
            acc += a(i, j) * x[j];
        }
        y[i] = acc;
    }
    return y;
}

bool is_irreducible(Matrix const& a)
{
    if (a.size() == 0)
    {
        return false;
    }
    for (bool reverse : {false, true})
    {
        auto const seen = reachable(a, 0, reverse);
        for (bool s : seen)
        {
            if (!s)
            {
                return false;
            }
        }
    }
    return true;
}

}  // namespace perpsim
