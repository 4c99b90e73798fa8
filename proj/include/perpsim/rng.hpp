//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file perpsim/rng.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace perpsim
{
//---------------------------------------------------------------------------//
/*!
 * Philox4x32-10 block function.
 *
 * Counter-based generator of Salmon et al. (SC'11): the output is a pure
 * function of (counter, key), which is what makes per-replication streams
 * reproducible regardless of how replications are distributed over threads.
 */
struct Philox4x32
{
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter apply(Counter ctr, Key key) noexcept
    {
        for (int round = 0; round < 10; ++round)
        {
            if (round > 0)
            {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            std::uint64_t const p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            std::uint64_t const p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            auto const hi0 = static_cast<std::uint32_t>(p0 >> 32);
            auto const lo0 = static_cast<std::uint32_t>(p0);
            auto const hi1 = static_cast<std::uint32_t>(p1 >> 32);
            auto const lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

//---------------------------------------------------------------------------//
/*!
 * Random stream identified by (seed, stream_id).
 *
 * The seed is the Philox key; the stream id occupies the high half of the
 * counter and a block index the low half, so distinct stream ids never
 * overlap. All variate transformations are implemented here rather than via
 * <random> distributions, whose algorithms are unspecified by the standard.
 */
class RngStream
{
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : key_{static_cast<std::uint32_t>(seed),
               static_cast<std::uint32_t>(seed >> 32)}
        , stream_id_(stream_id)
    {
    }

    std::uint64_t stream_id() const noexcept { return stream_id_; }

    //! Next 64 raw bits
    std::uint64_t next_u64() noexcept
    {
        if (used_ == 2)
        {
            refill();
        }
        return buffer_[used_++];
    }

    //! Uniform on the open interval (0, 1)
    double uniform() noexcept
    {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    //! Standard normal by the Marsaglia polar method
    double normal() noexcept
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        double u, v, r2;
        do
        {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            r2 = u * u + v * v;
        } while (r2 >= 1.0);
        double const f = std::sqrt(-2.0 * std::log(r2) / r2);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    //! Gamma(shape, 1) by Marsaglia and Tsang, boosted for shape < 1
    double gamma(double shape) noexcept
    {
        if (shape < 1.0)
        {
            double const g = gamma(shape + 1.0);
            return g * std::pow(uniform(), 1.0 / shape);
        }
        double const d = shape - 1.0 / 3.0;
        double const c = 1.0 / std::sqrt(9.0 * d);
        for (;;)
        {
            double x, v;
            do
            {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            double const u = uniform();
            double const x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2)
            {
                return d * v;
            }
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v)))
            {
                return d * v;
            }
        }
    }

  private:
    void refill() noexcept
    {
        Philox4x32::Counter const ctr{
            static_cast<std::uint32_t>(block_),
            static_cast<std::uint32_t>(block_ >> 32),
            static_cast<std::uint32_t>(stream_id_),
            static_cast<std::uint32_t>(stream_id_ >> 32)};
        auto const out = Philox4x32::apply(ctr, key_);
        buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
        buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
        ++block_;
        used_ = 0;
    }

    Philox4x32::Key key_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int used_ = 2;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace perpsim
