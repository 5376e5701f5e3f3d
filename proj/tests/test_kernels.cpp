#include <gtest/gtest.h>

#include <numeric>

#include "boundlab/kernels.hpp"
#include "support/generators.hpp"

using namespace boundlab;
using namespace boundlab::testing;

namespace {

Matrix start_rows(std::mt19937_64& rng, int rows, int S) {
    Matrix m(rows, S);
    for (int i = 0; i < rows; ++i) m.row(i) = dirichlet_one(rng, S).transpose();
    return m;
}

}  // namespace

TEST(Kernels, SerialAndOpenMpAgreeExactly) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const Mdp mdp = random_mdp(rng, 6, 3);
        const int S = mdp.n_states();
        const int A = mdp.n_actions();
        const RowVector nu = dirichlet_one(rng, S).transpose();
        const Matrix rows = start_rows(rng, 5, S);
        std::vector<Actions> policies;
        for (int k = 0; k < 40; ++k) policies.push_back(random_actions(rng, S, A));
        std::vector<std::size_t> idx(policies.size());
        std::iota(idx.begin(), idx.end(), 0);

        EXPECT_EQ(kernels::serial::vertex_gaps(mdp, nu, policies, idx),
                  kernels::openmp::vertex_gaps(mdp, nu, policies, idx));
        const Matrix ls = kernels::serial::stationary_terms(mdp, rows, nu, policies, 6);
        const Matrix lo = kernels::openmp::stationary_terms(mdp, rows, nu, policies, 6);
        EXPECT_TRUE(ls == lo);
        const Matrix us = kernels::serial::nonstationary_terms(mdp, rows, nu, 6);
        const Matrix uo = kernels::openmp::nonstationary_terms(mdp, rows, nu, 6);
        EXPECT_TRUE(us == uo);
    }
}

TEST(Kernels, StationaryTermsMatchDirectPowers) {
    std::mt19937_64 rng(22);
    const Mdp mdp = random_mdp(rng, 4, 2, 0.9);
    const RowVector nu = dirichlet_one(rng, 4).transpose();
    const Matrix rows = start_rows(rng, 2, 4);
    const auto policies = all_actions(4, 2);
    const Matrix lower = kernels::serial::stationary_terms(mdp, rows, nu, policies, 4);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j <= 4; ++j) {
            double best = 0.0;
            for (const Actions& a : policies) {
                const Matrix p = transition_under(mdp, StochasticPolicy::deterministic(a, 2));
                RowVector x = rows.row(i);
                for (int t = 0; t < j; ++t) x = x * p;
                best = std::max(best, density_ratio_norm(x, nu));
            }
            EXPECT_NEAR(lower(i, j), best, 1e-12);
        }
    }
}

TEST(Kernels, NonstationaryDominatesAndMatchesEnumeration) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const Mdp mdp = random_mdp(rng, 3, 2, 0.9);
        const int S = mdp.n_states();
        const int A = mdp.n_actions();
        const RowVector nu = dirichlet_one(rng, S).transpose();
        const Matrix rows = start_rows(rng, 1, S);
        const int j_max = 3;
        const Matrix upper = kernels::serial::nonstationary_terms(mdp, rows, nu, j_max);
        // Brute force over every sequence of deterministic per-step policies.
        const auto policies = all_actions(S, A);
        for (int j = 0; j <= j_max; ++j) {
            double best = 0.0;
            std::vector<std::size_t> digit(j, 0);
            for (;;) {
                RowVector x = rows.row(0);
                for (int t = 0; t < j; ++t)
                    x = x * transition_under(mdp, StochasticPolicy::deterministic(policies[digit[t]], A));
                best = std::max(best, density_ratio_norm(x, nu));
                int pos = 0;
                while (pos < j && ++digit[pos] == policies.size()) digit[pos++] = 0;
                if (pos == j) break;
            }
            EXPECT_NEAR(upper(0, j), best, 1e-12) << "j=" << j;
        }
    }
}
