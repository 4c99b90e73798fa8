//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file perpsim/spectral.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <vector>

#include "matrix.hpp"
#include "model.hpp"

namespace perpsim
{
//---------------------------------------------------------------------------//
/*!
 * Dominant eigenpair of a non-negative irreducible matrix.
 *
 * The eigenvector is normalized so that its smallest component is exactly 1;
 * this fixes u continuously in theta.
 */
struct SpectralSolution
{
    double theta = 0;
    double log_eig = 0;  //!< psi(theta)
    std::vector<double> eigvec;
    double residual = 0;  //!< sup-norm of Q u - e^psi u
};

//---------------------------------------------------------------------------//
/*!
 * Exponential change of measure at the Cramer root.
 *
 * Holds everything the tilted samplers need: theta*, the drift mu =
 * psi'(theta*), the eigenvector u_{theta*} (and its log), and the tilted
 * kernel K_{theta*}(x,y) = K(x,y) exp(chi(y,theta*)) u(y) / u(x).
 */
struct TiltEnvelope
{
    double theta_star = 0;
    double psi_at_root = 0;
    double mu = 0;
    std::vector<double> u_star;
    std::vector<double> log_u_star;
    Matrix tilted_kernel;
    std::vector<std::vector<double>> tilted_cumulative;
};

// Q_theta(x,y) = K(x,y) exp(chi(y, theta))
Matrix tilted_matrix(Model const& model, double theta);

// Power iteration with a cross-check against the characteristic polynomial
// for matrices with at most eight states.
SpectralSolution principal_eig(Matrix const& q);

// Eigen-solution of Q_theta; theta is recorded in the result
SpectralSolution solve_tilt(Model const& model, double theta);

// log of the Perron-Frobenius eigenvalue of Q_theta
double psi(Model const& model, double theta);

// psi'(theta) by Richardson-extrapolated central differences
double psi_derivative(Model const& model, double theta, double h = 1e-5);

// psi''(theta) by central differences
double psi_second_derivative(Model const& model, double theta, double h = 1e-4);

// Bisection for the positive root of psi and the tilted kernel built on it
TiltEnvelope find_theta_star(Model const& model);

// sup of (psi'' + psi'^2) / 2 over a uniform grid on [0, theta*]
double psi_second_sup(Model const& model, double theta_star, int grid_n);

// Closed-form Perron root of a 2x2 non-negative matrix
double two_by_two_perron_root(Matrix const& q);

}  // namespace perpsim
