#pragma once

// Data-parallel inner loops. Every kernel has a serial reference version and
// an OpenMP version that must agree bit for bit (all reductions are max).

#include <span>
#include <vector>

#include "boundlab/mdp.hpp"

namespace boundlab::kernels {

enum class Backend { serial, openmp };

namespace serial {

/// gaps[k] = nu T v_k - max_{k'} nu T_{v_k'} v_k for each listed vertex row k.
std::vector<double> vertex_gaps(const Mdp& mdp, const RowVector& nu,
                                const std::vector<Actions>& vertices,
                                std::span<const std::size_t> rows);

/// L(i,j) = max over the given stationary policies of |start.row(i) P_pi^j / nu|_inf.
Matrix stationary_terms(const Mdp& mdp, const Matrix& start_rows, const RowVector& nu,
                        const std::vector<Actions>& policies, int j_max);

/// U(i,j) = max_t max over nonstationary action sequences of
/// (start.row(i) P_{a_1} ... P_{a_j})(t) / nu(t), by backward dynamic programming.
Matrix nonstationary_terms(const Mdp& mdp, const Matrix& start_rows, const RowVector& nu,
                           int j_max);

}  // namespace serial

namespace openmp {

std::vector<double> vertex_gaps(const Mdp& mdp, const RowVector& nu,
                                const std::vector<Actions>& vertices,
                                std::span<const std::size_t> rows);

Matrix stationary_terms(const Mdp& mdp, const Matrix& start_rows, const RowVector& nu,
                        const std::vector<Actions>& policies, int j_max);

Matrix nonstationary_terms(const Mdp& mdp, const Matrix& start_rows, const RowVector& nu,
                           int j_max);

}  // namespace openmp

std::vector<double> vertex_gaps(const Mdp& mdp, const RowVector& nu,
                                const std::vector<Actions>& vertices,
                                std::span<const std::size_t> rows, Backend backend);

Matrix stationary_terms(const Mdp& mdp, const Matrix& start_rows, const RowVector& nu,
                        const std::vector<Actions>& policies, int j_max, Backend backend);

Matrix nonstationary_terms(const Mdp& mdp, const Matrix& start_rows, const RowVector& nu,
                           int j_max, Backend backend);

namespace detail {

/// P_pi for a deterministic policy, S x S.
Matrix deterministic_kernel(const Mdp& mdp, const Actions& actions);

/// Per-vertex quantities shared by both vertex_gaps versions.
double vertex_gap(const Mdp& mdp, const RowVector& nu, const std::vector<Actions>& vertices,
                  std::size_t k);

/// Folds the ratio terms of one stationary policy into lower.
void accumulate_stationary(const Mdp& mdp, const Matrix& start_rows, const RowVector& nu,
                           const Actions& policy, int j_max, Matrix& lower);

/// Folds the terms of one target state into upper.
void accumulate_target(const Mdp& mdp, const Matrix& start_rows, const RowVector& nu, int target,
                       int j_max, Matrix& upper);

}  // namespace detail

}  // namespace boundlab::kernels
