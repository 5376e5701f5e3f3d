#include <omp.h>

#include "boundlab/kernels.hpp"

namespace boundlab::kernels::openmp {

std::vector<double> vertex_gaps(const Mdp& mdp, const RowVector& nu,
                                const std::vector<Actions>& vertices,
                                std::span<const std::size_t> rows) {
    std::vector<double> out(rows.size());
    const auto n = static_cast<long>(rows.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (long r = 0; r < n; ++r) out[r] = detail::vertex_gap(mdp, nu, vertices, rows[r]);
    return out;
}

Matrix stationary_terms(const Mdp& mdp, const Matrix& start_rows, const RowVector& nu,
                        const std::vector<Actions>& policies, int j_max) {
    Matrix lower = Matrix::Zero(start_rows.rows(), j_max + 1);
    const auto n = static_cast<long>(policies.size());
#pragma omp parallel
    {
        Matrix local = Matrix::Zero(start_rows.rows(), j_max + 1);
#pragma omp for schedule(static) nowait
        for (long k = 0; k < n; ++k)
            detail::accumulate_stationary(mdp, start_rows, nu, policies[k], j_max, local);
#pragma omp critical(boundlab_stationary_merge)
        lower = lower.cwiseMax(local);
    }
    return lower;
}

Matrix nonstationary_terms(const Mdp& mdp, const Matrix& start_rows, const RowVector& nu,
                           int j_max) {
    Matrix upper = Matrix::Zero(start_rows.rows(), j_max + 1);
    const int S = mdp.n_states();
#pragma omp parallel
    {
        Matrix local = Matrix::Zero(start_rows.rows(), j_max + 1);
#pragma omp for schedule(static) nowait
        for (int t = 0; t < S; ++t) detail::accumulate_target(mdp, start_rows, nu, t, j_max, local);
#pragma omp critical(boundlab_target_merge)
        upper = upper.cwiseMax(local);
    }
    return upper;
}

}  // namespace boundlab::kernels::openmp
