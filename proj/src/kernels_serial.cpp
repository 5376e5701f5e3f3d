#include <limits>

#include "boundlab/kernels.hpp"

namespace boundlab::kernels {

namespace detail {

Matrix deterministic_kernel(const Mdp& mdp, const Actions& actions) {
    const int S = mdp.n_states();
    Matrix p(S, S);
    for (int s = 0; s < S; ++s) p.row(s) = mdp.kernel().row(mdp.row(s, actions[s]));
    return p;
}

double vertex_gap(const Mdp& mdp, const RowVector& nu, const std::vector<Actions>& vertices,
                  std::size_t k) {
    const ValueFn v = evaluate(mdp, StochasticPolicy::deterministic(vertices[k], mdp.n_actions()));
    const Matrix q = q_values(mdp, v);
    const double greedy = nu.dot(q.rowwise().maxCoeff());
    double best = -std::numeric_limits<double>::infinity();
    for (const Actions& other : vertices) {
        double value = 0.0;
        for (int s = 0; s < mdp.n_states(); ++s) value += nu(s) * q(s, other[s]);
        best = std::max(best, value);
    }
    return greedy - best;
}

void accumulate_stationary(const Mdp& mdp, const Matrix& start_rows, const RowVector& nu,
                           const Actions& policy, int j_max, Matrix& lower) {
    const Matrix p = deterministic_kernel(mdp, policy);
    Matrix x = start_rows;
    for (int j = 0; j <= j_max; ++j) {
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            lower(i, j) = std::max(lower(i, j), density_ratio_norm(RowVector(x.row(i)), nu));
        if (j < j_max) x = x * p;
    }
}

void accumulate_target(const Mdp& mdp, const Matrix& start_rows, const RowVector& nu, int target,
                       int j_max, Matrix& upper) {
    const int S = mdp.n_states();
    const int A = mdp.n_actions();
    Vector w = Vector::Zero(S);
    w(target) = 1.0;
    const double inf = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= j_max; ++j) {
        const Vector mass = start_rows * w;
        for (Eigen::Index i = 0; i < start_rows.rows(); ++i) {
            double term = 0.0;
            if (mass(i) > 0.0) term = nu(target) > 0.0 ? mass(i) / nu(target) : inf;
            upper(i, j) = std::max(upper(i, j), term);
        }
        if (j == j_max) break;
        const Vector next = mdp.kernel() * w;
        for (int s = 0; s < S; ++s) {
            double best = next(mdp.row(s, 0));
            for (int a = 1; a < A; ++a) best = std::max(best, next(mdp.row(s, a)));
            w(s) = best;
        }
    }
}

}  // namespace detail

namespace serial {

std::vector<double> vertex_gaps(const Mdp& mdp, const RowVector& nu,
                                const std::vector<Actions>& vertices,
                                std::span<const std::size_t> rows) {
    std::vector<double> out(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        out[r] = detail::vertex_gap(mdp, nu, vertices, rows[r]);
    return out;
}

Matrix stationary_terms(const Mdp& mdp, const Matrix& start_rows, const RowVector& nu,
                        const std::vector<Actions>& policies, int j_max) {
    Matrix lower = Matrix::Zero(start_rows.rows(), j_max + 1);
    for (const Actions& policy : policies)
        detail::accumulate_stationary(mdp, start_rows, nu, policy, j_max, lower);
    return lower;
}

Matrix nonstationary_terms(const Mdp& mdp, const Matrix& start_rows, const RowVector& nu,
                           int j_max) {
    Matrix upper = Matrix::Zero(start_rows.rows(), j_max + 1);
    for (int t = 0; t < mdp.n_states(); ++t)
        detail::accumulate_target(mdp, start_rows, nu, t, j_max, upper);
    return upper;
}

}  // namespace serial

std::vector<double> vertex_gaps(const Mdp& mdp, const RowVector& nu,
                                const std::vector<Actions>& vertices,
                                std::span<const std::size_t> rows, Backend backend) {
    return backend == Backend::serial ? serial::vertex_gaps(mdp, nu, vertices, rows)
                                      : openmp::vertex_gaps(mdp, nu, vertices, rows);
}

Matrix stationary_terms(const Mdp& mdp, const Matrix& start_rows, const RowVector& nu,
                        const std::vector<Actions>& policies, int j_max, Backend backend) {
    return backend == Backend::serial
               ? serial::stationary_terms(mdp, start_rows, nu, policies, j_max)
               : openmp::stationary_terms(mdp, start_rows, nu, policies, j_max);
}

Matrix nonstationary_terms(const Mdp& mdp, const Matrix& start_rows, const RowVector& nu,
                           int j_max, Backend backend) {
    return backend == Backend::serial ? serial::nonstationary_terms(mdp, start_rows, nu, j_max)
                                      : openmp::nonstationary_terms(mdp, start_rows, nu, j_max);
}

}  // namespace boundlab::kernels
