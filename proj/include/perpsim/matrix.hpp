//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file perpsim/matrix.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace perpsim
{
//---------------------------------------------------------------------------//
/*!
 * Small dense square matrix in row-major order.
 *
 * State spaces here have a handful of states, so no attempt is made at
 * blocking or vectorization.
 */
class Matrix
{
  public:
    Matrix() = default;
    explicit Matrix(std::size_t n, double fill = 0.0)
        : n_(n), data_(n * n, fill)
    {
    }
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t size() const noexcept { return n_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const
    {
        return data_[i * n_ + j];
    }

    std::span<double const> row(std::size_t i) const
    {
        return {data_.data() + i * n_, n_};
    }

    static Matrix identity(std::size_t n);

    bool operator==(Matrix const&) const = default;

  private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

// y = A x
std::vector<double> multiply(Matrix const& a, std::span<double const> x);

// True if the directed graph of positive entries is strongly connected
bool is_irreducible(Matrix const& a);

}  // namespace perpsim
