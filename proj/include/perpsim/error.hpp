//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file perpsim/error.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <stdexcept>
#include <string>

namespace perpsim
{
//---------------------------------------------------------------------------//
/*!
 * Base class of every exception thrown by the library.
 *
 * The C API maps each subclass onto a status code, so new subclasses must be
 * added to the translation table in capi.cpp as well.
 */
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! A caller-supplied argument is outside its documented range.
class InvalidArgument : public Error
{
  public:
    using Error::Error;
};

//! A cumulant generating function was evaluated outside its domain.
class DomainError : public Error
{
  public:
    using Error::Error;
};

//! Iterative numerics failed (no convergence, no root, reducible matrix).
class NumericError : public Error
{
  public:
    using Error::Error;
};

//! Malformed or inconsistent configuration text.
class ConfigError : public Error
{
  public:
    using Error::Error;
};

//---------------------------------------------------------------------------//
/*!
 * The drift-budget inequality does not hold at the requested scale.
 *
 * Carries the largest scale at which the inequality was found to hold so
 * callers can report an actionable refusal.
 */
class LyapunovRefusal : public Error
{
  public:
    LyapunovRefusal(std::string const& what, double budget, double largest)
        : Error(what), budget_(budget), largest_admissible_(largest)
    {
    }

    double budget() const noexcept { return budget_; }
    double largest_admissible_delta() const noexcept
    {
        return largest_admissible_;
    }

  private:
    double budget_;
    double largest_admissible_;
};

//! File could not be opened or written.
class IoError : public Error
{
  public:
    using Error::Error;
};

}  // namespace perpsim
