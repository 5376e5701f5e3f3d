#pragma once

#include "boundlab/mdp.hpp"

namespace boundlab::reference {

// Naive reimplementations used as independent checks. They build every matrix
// with explicit loops and never call the library's evaluation routines.

/// P_w, r_w for a row-stochastic-or-signed action table w (rows need not be
/// nonnegative; used for two-sided finite differences).
Matrix kernel_under(const Mdp& mdp, const Matrix& w);
Vector reward_under(const Mdp& mdp, const Matrix& w);

/// (I - gamma P_w)^{-1} r_w by full-pivot LU.
Vector value(const Mdp& mdp, const Matrix& w);

/// sum_{t < horizon} gamma^t P_w^t r_w.
Vector truncated_series_value(const Mdp& mdp, const Matrix& w, int horizon);

/// nu . value(w).
double objective(const Mdp& mdp, const RowVector& nu, const Matrix& w);

/// J_nu((1 - alpha) pi + alpha pi'), with alpha allowed outside [0, 1].
double mixture_objective(const Mdp& mdp, const RowVector& nu, const Matrix& pi,
                         const Matrix& pi_prime, double alpha);

/// (J(alpha) - J(-alpha)) / (2 alpha) along pi -> pi'.
double central_difference(const Mdp& mdp, const RowVector& nu, const Matrix& pi,
                          const Matrix& pi_prime, double alpha);

/// Least-squares slope of log|y| against log x.
double fitted_exponent(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace boundlab::reference
