//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file spectral.cpp
//---------------------------------------------------------------------------//
#include "perpsim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "perpsim/error.hpp"

namespace perpsim
{
namespace
{
constexpr int kMaxIterations = 100000;
constexpr double kLogEigTol = 1e-13;
constexpr double kVectorTol = 1e-13;
constexpr double kTwoByTwoTol = 1e-10;
constexpr double kCharPolyEps = 1e-9;
constexpr double kRowSumTol = 1e-10;

// det(a) by Gaussian elimination with partial pivoting
double determinant(Matrix a)
{
    std::size_t const n = a.size();
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col)
    {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
        {
            if (std::fabs(a(r, col)) > std::fabs(a(pivot, col)))
            {
                pivot = r;
            }
        }
        if (a(pivot, col) == 0.0)
        {
            return 0.0;
        }
        if (pivot != col)
        {
            for (std::size_t c = 0; c < n; ++c)
            {
                std::swap(a(pivot, c), a(col, c));
            }
            det = -det;
        }
        det *= a(col, col);
        for (std::size_t r = col + 1; r < n; ++r)
        {
            double const f = a(r, col) / a(col, col);
            for (std::size_t c = col; c < n; ++c)
            {
                a(r, c) -= f * a(col, c);
            }
        }
    }
    return det;
}

double char_poly(Matrix const& q, double lambda)
{
    Matrix m(q.size());
    for (std::size_t i = 0; i < q.size(); ++i)
    {
        for (std::size_t j = 0; j < q.size(); ++j)
        {
            m(i, j) = (i == j ? lambda : 0.0) - q(i, j);
        }
    }
    return determinant(m);
}

// Perron root must be a simple zero of det(lambda I - Q): the characteristic
// polynomial changes sign across it.
void cross_check(Matrix const& q, double eig)
{
    std::size_t const n = q.size();
    if (n == 2)
    {
        double const closed = two_by_two_perron_root(q);
        if (std::fabs(closed - eig) > kTwoByTwoTol * std::fabs(closed))
        {
            throw NumericError(
                "power iteration disagrees with the closed-form 2x2 root");
        }
    }
    if (n >= 2 && n <= 8)
    {
        double const lo = char_poly(q, eig * (1 - kCharPolyEps));
        double const hi = char_poly(q, eig * (1 + kCharPolyEps));
        if (lo * hi > 0)
        {
            throw NumericError(
                "power iteration eigenvalue is not a root of the "
                "characteristic polynomial");
        }
    }
}

void normalize_min_one(std::vector<double>& v)
{
    double const lo = *std::min_element(v.begin(), v.end());
    for (double& x : v)
    {
        x /= lo;
    }
}

std::string format(double v)
{
    return std::to_string(v);
}
}  // namespace

//---------------------------------------------------------------------------//
double two_by_two_perron_root(Matrix const& q)
{
    if (q.size() != 2)
    {
        throw InvalidArgument("closed-form root needs a 2x2 matrix");
    }
    double const half_trace = 0.5 * (q(0, 0) + q(1, 1));
    double const half_diff = 0.5 * (q(0, 0) - q(1, 1));
    return half_trace + std::sqrt(half_diff * half_diff + q(0, 1) * q(1, 0));
}

Matrix tilted_matrix(Model const& model, double theta)
{
    std::size_t const n = model.num_states();
    Matrix q(n);
    for (std::size_t y = 0; y < n; ++y)
    {
        double const factor = std::exp(model.cgf(y, theta));
        for (std::size_t x = 0; x < n; ++x)
        {
            q(x, y) = model.kernel()(x, y) * factor;
        }
    }
    return q;
}

//---------------------------------------------------------------------------//
SpectralSolution principal_eig(Matrix const& q)
{
    std::size_t const n = q.size();
    if (n == 0)
    {
        throw InvalidArgument("empty matrix");
    }
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = 0; j < n; ++j)
        {
            if (!(q(i, j) >= 0) || !std::isfinite(q(i, j)))
            {
                throw NumericError("matrix must be finite and non-negative");
            }
        }
    }
    if (!is_irreducible(q))
    {
        throw NumericError("matrix is reducible");
    }

    SpectralSolution sol;
    if (n == 1)
    {
        if (!(q(0, 0) > 0))
        {
            throw NumericError("matrix has zero spectral radius");
        }
        sol.log_eig = std::log(q(0, 0));
        sol.eigvec = {1.0};
        return sol;
    }

    // Shift by half the largest row sum: same eigenvectors, and periodic
    // matrices become primitive.
    double max_row = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        auto const r = q.row(i);
        max_row = std::max(max_row, std::accumulate(r.begin(), r.end(), 0.0));
    }
    double const shift = 0.5 * max_row;

    std::vector<double> u(n, 1.0 / static_cast<double>(n));
    double log_est = -std::numeric_limits<double>::infinity();
    bool converged = false;
    double eig = 0;
    for (int it = 0; it < kMaxIterations; ++it)
    {
        auto v = multiply(q, u);
        double sum = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            v[i] += shift * u[i];
            sum += v[i];
        }
        // u sums to one, so sum(v) estimates the shifted eigenvalue
        eig = sum - shift;
        double const next_log = std::log(eig);
        double change = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            v[i] /= sum;
            change = std::max(change, std::fabs(v[i] - u[i]));
        }
        u = std::move(v);
        if (std::fabs(next_log - log_est) < kLogEigTol && change < kVectorTol)
        {
            converged = true;
            log_est = next_log;
            break;
        }
        log_est = next_log;
    }

    normalize_min_one(u);
    auto const qu = multiply(q, u);
    double residual = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        residual = std::max(residual, std::fabs(qu[i] - eig * u[i]));
    }
    if (!converged)
    {
        throw NumericError("power iteration did not converge; last residual "
                           + format(residual));
    }
    cross_check(q, eig);

    sol.log_eig = log_est;
    sol.eigvec = std::move(u);
    sol.residual = residual;
    return sol;
}

SpectralSolution solve_tilt(Model const& model, double theta)
{
    // Factor out the largest exp(chi) so large theta cannot overflow.
    std::size_t const n = model.num_states();
    std::vector<double> chi(n);
    for (std::size_t y = 0; y < n; ++y)
    {
        chi[y] = model.cgf(y, theta);
    }
    double const scale = *std::max_element(chi.begin(), chi.end());
    Matrix q(n);
    for (std::size_t x = 0; x < n; ++x)
    {
        for (std::size_t y = 0; y < n; ++y)
        {
            q(x, y) = model.kernel()(x, y) * std::exp(chi[y] - scale);
        }
    }
    auto sol = principal_eig(q);
    sol.theta = theta;
    sol.log_eig += scale;
    sol.residual *= std::exp(scale);
    return sol;
}

double psi(Model const& model, double theta)
{
    if (model.num_states() == 1)
    {
        return model.cgf(0, theta);
    }
    return solve_tilt(model, theta).log_eig;
}

double psi_derivative(Model const& model, double theta, double h)
{
    auto central = [&](double step) {
        return (psi(model, theta + step) - psi(model, theta - step))
               / (2 * step);
    };
    return (4 * central(0.5 * h) - central(h)) / 3;
}

double psi_second_derivative(Model const& model, double theta, double h)
{
    return (psi(model, theta + h) - 2 * psi(model, theta)
            + psi(model, theta - h))
           / (h * h);
}

//---------------------------------------------------------------------------//
TiltEnvelope find_theta_star(Model const& model)
{
    auto const domain = model.cgf_domain();
    double const limit = std::isfinite(domain.upper) ? domain.upper - 1e-6
                                                     : 1e4;
    auto psi_or_inf = [&](double t) {
        double const v = psi(model, t);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    double lo = 0.01;
    if (!(lo < limit) || !(psi_or_inf(lo) < 0))
    {
        throw NumericError("Cramer condition not satisfied: psi is not "
                           "negative near zero");
    }
    double hi = lo;
    for (;;)
    {
        double const next = std::min(2 * hi, limit);
        if (next <= hi)
        {
            throw NumericError("Cramer condition not satisfied: no sign "
                               "change of psi inside the CGF domain");
        }
        lo = hi;
        hi = next;
        if (psi_or_inf(hi) > 0)
        {
            break;
        }
    }

    while (hi - lo > 1e-12)
    {
        double const mid = 0.5 * (lo + hi);
        if (psi_or_inf(mid) < 0)
        {
            lo = mid;
        }
        else
        {
            hi = mid;
        }
    }
    double const root = 0.5 * (lo + hi);
    double const at_root = psi(model, root);
    if (std::fabs(at_root) > 1e-10)
    {
        throw NumericError("bisection ended with |psi(theta*)| = "
                           + format(std::fabs(at_root)));
    }

    TiltEnvelope env;
    env.theta_star = root;
    env.psi_at_root = at_root;
    env.mu = psi_derivative(model, root);
    if (!(env.mu > 0))
    {
        throw NumericError("psi'(theta*) is not positive");
    }
    auto const sol = solve_tilt(model, root);
    env.u_star = sol.eigvec;
    env.log_u_star.resize(env.u_star.size());
    std::transform(env.u_star.begin(),
                   env.u_star.end(),
                   env.log_u_star.begin(),
                   [](double u) { return std::log(u); });

    std::size_t const n = model.num_states();
    env.tilted_kernel = Matrix(n);
    for (std::size_t x = 0; x < n; ++x)
    {
        double row_sum = 0;
        for (std::size_t y = 0; y < n; ++y)
        {
            double const k = model.kernel()(x, y);
            double const entry
                = k == 0 ? 0.0
                         : k * std::exp(model.cgf(y, root) - at_root)
                               * env.u_star[y] / env.u_star[x];
            env.tilted_kernel(x, y) = entry;
            row_sum += entry;
        }
        if (std::fabs(row_sum - 1) > kRowSumTol)
        {
            throw NumericError("tilted kernel row " + std::to_string(x)
                               + " sums to " + format(row_sum));
        }
        env.tilted_cumulative.push_back(
            cumulative_probabilities(env.tilted_kernel.row(x)));
    }
    return env;
}

double psi_second_sup(Model const& model, double theta_star, int grid_n)
{
    if (grid_n < 32)
    {
        throw InvalidArgument("grid too coarse: need at least 32 points");
    }
    if (!(theta_star > 0))
    {
        throw InvalidArgument("theta* must be positive");
    }
    constexpr double h = 1e-4;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_n; ++i)
    {
        double const zeta = theta_star * i / (grid_n - 1);
        double const minus = psi(model, zeta - h);
        double const mid = psi(model, zeta);
        double const plus = psi(model, zeta + h);
        double const d1 = (plus - minus) / (2 * h);
        double const d2 = (plus - 2 * mid + minus) / (h * h);
        best = std::max(best, 0.5 * (d2 + d1 * d1));
    }
    return best;
}

}  // namespace perpsim
