#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "boundlab/errors.hpp"
#include "boundlab/mdp.hpp"
#include "boundlab/reference.hpp"
#include "support/generators.hpp"

using namespace boundlab;
using namespace boundlab::testing;

namespace {

Mdp two_state_chain() {
    // Action 0 stays, action 1 swaps.
    const double t[] = {1, 0, 0, 1, 0, 1, 1, 0};
    const double r[] = {0, 1, 2, 0};
    return Mdp(2, 2, 0.9, t, r);
}

}  // namespace

TEST(Mdp, RejectsBadRowsAndDiscount) {
    const double bad_row[] = {0.5, 0.4};
    const double r[] = {0.0};
    EXPECT_THROW(Mdp(2, 1, 0.9, std::span<const double>(bad_row, 2), std::span<const double>(r, 1)),
                 std::invalid_argument);
    const double t[] = {1.0};
    EXPECT_THROW(Mdp(1, 1, 1.0, t, r), std::invalid_argument);
    EXPECT_THROW(Mdp(1, 1, -0.1, t, r), std::invalid_argument);
    const double nan_r[] = {std::numeric_limits<double>::quiet_NaN()};
    EXPECT_THROW(Mdp(1, 1, 0.5, t, nan_r), std::invalid_argument);
    const double negative[] = {1.5, -0.5};
    EXPECT_THROW(Mdp(2, 1, 0.5, std::span<const double>(negative, 2), std::span<const double>(r, 1)),
                 std::invalid_argument);
}

TEST(Mdp, RejectsBadPolicies) {
    Matrix p(1, 2);
    p << 0.7, 0.2;
    EXPECT_THROW(StochasticPolicy{p}, std::invalid_argument);
    p << 1.2, -0.2;
    EXPECT_THROW(StochasticPolicy{p}, std::invalid_argument);
    const int actions[] = {0, 2};
    EXPECT_THROW(StochasticPolicy::deterministic(actions, 2), std::invalid_argument);
}

TEST(Mdp, ShapeMismatchThrowsDimensionError) {
    const Mdp mdp = two_state_chain();
    EXPECT_THROW(evaluate(mdp, StochasticPolicy::uniform(3, 2)), DimensionError);
    EXPECT_THROW(occupancy(mdp, OccupancyWeights::uniform(3), StochasticPolicy::uniform(2, 2)),
                 DimensionError);
}

TEST(Mdp, HandWorkedValues) {
    const Mdp mdp = two_state_chain();
    // Always swap: v0 = 1 + 0.9 v1, v1 = 0 + 0.9 v0.
    const int swap[] = {1, 1};
    const ValueFn v = evaluate(mdp, StochasticPolicy::deterministic(swap, 2));
    EXPECT_NEAR(v(0), 1.0 / (1 - 0.81), 1e-12);
    EXPECT_NEAR(v(1), 0.9 / (1 - 0.81), 1e-12);
    // Staying in state 1 earns 2 forever; state 0 swaps into it.
    const OptimalSolution opt = optimal_solve(mdp);
    EXPECT_EQ(opt.actions, (Actions{1, 0}));
    EXPECT_NEAR(opt.value(1), 20.0, 1e-12);
    EXPECT_NEAR(opt.value(0), 19.0, 1e-12);
}

TEST(Mdp, OperatorsMatchNaiveLoops) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        const Mdp mdp = random_mdp(rng);
        const StochasticPolicy pi = random_policy(rng, mdp.n_states(), mdp.n_actions());
        EXPECT_LE((reward_under(mdp, pi) - reference::reward_under(mdp, pi.probs())).lpNorm<Eigen::Infinity>(),
                  1e-14);
        EXPECT_LE((transition_under(mdp, pi) - reference::kernel_under(mdp, pi.probs())).lpNorm<Eigen::Infinity>(),
                  1e-14);
        Vector v = Vector::Random(mdp.n_states());
        Matrix q = q_values(mdp, v);
        for (int s = 0; s < mdp.n_states(); ++s) {
            for (int a = 0; a < mdp.n_actions(); ++a) {
                double expect = mdp.reward(s, a);
                for (int t = 0; t < mdp.n_states(); ++t) expect += mdp.discount() * mdp.transition(s, a, t) * v(t);
                EXPECT_NEAR(q(s, a), expect, 1e-13);
            }
        }
    }
}

TEST(Mdp, EvaluateMatchesTruncatedSeries) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const Mdp mdp = random_mdp(rng, 6, 3);
        const StochasticPolicy pi = random_policy(rng, mdp.n_states(), mdp.n_actions());
        // gamma^H <= 1e-13 for every discount in the generator.
        const int horizon = static_cast<int>(std::ceil(std::log(1e-13) / std::log(mdp.discount())));
        const Vector series = reference::truncated_series_value(mdp, pi.probs(), horizon);
        const ValueFn v = evaluate(mdp, pi);
        EXPECT_LE((v - series).lpNorm<Eigen::Infinity>(), 1e-9 * (1.0 + v.lpNorm<Eigen::Infinity>()));
        // Fixed point of T_pi.
        EXPECT_LE((bellman(mdp, pi, v) - v).lpNorm<Eigen::Infinity>(), 1e-10 * (1.0 + v.lpNorm<Eigen::Infinity>()));
    }
}

TEST(Mdp, OccupancyIsDistributionDominatingMu) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const Mdp mdp = random_mdp(rng);
        const StochasticPolicy pi = random_policy(rng, mdp.n_states(), mdp.n_actions());
        const OccupancyWeights mu = random_distribution(rng, mdp.n_states());
        const OccupancyWeights d = occupancy(mdp, mu, pi);
        EXPECT_NEAR(d.sum(), 1.0, 1e-12);
        for (int s = 0; s < mdp.n_states(); ++s)
            EXPECT_GE(d[s], (1.0 - mdp.discount()) * mu[s] - 1e-14);
        // mu v_pi = d r_pi / (1 - gamma)
        EXPECT_NEAR(mu.dot(evaluate(mdp, pi)), d.dot(reward_under(mdp, pi)) / (1.0 - mdp.discount()),
                    1e-9);
    }
}

TEST(Mdp, OptimalMatchesEnumeration) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 40; ++trial) {
        const Mdp mdp = random_mdp(rng, 4, 3);
        const OptimalSolution opt = optimal_solve(mdp);
        Vector best = Vector::Constant(mdp.n_states(), -std::numeric_limits<double>::infinity());
        for (const Actions& a : all_actions(mdp.n_states(), mdp.n_actions()))
            best = best.cwiseMax(reference::value(mdp, StochasticPolicy::deterministic(a, mdp.n_actions()).probs()));
        EXPECT_LE((opt.value - best).lpNorm<Eigen::Infinity>(), 1e-9 * (1.0 + best.lpNorm<Eigen::Infinity>()));
        // v_* is the fixed point of T.
        EXPECT_LE((bellman_optimal(mdp, opt.value).value - opt.value).lpNorm<Eigen::Infinity>(), 1e-9);
    }
}

TEST(Mdp, PolicyIterationImprovesMonotonically) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const Mdp mdp = random_mdp(rng, 6, 3);
        const Actions init = random_actions(rng, mdp.n_states(), mdp.n_actions());
        const PolicyIterationTrace trace = policy_iteration(mdp, init);
        ASSERT_EQ(trace.trajectory.front(), init);
        for (std::size_t k = 1; k < trace.trajectory.size(); ++k) {
            const ValueFn prev = evaluate(mdp, StochasticPolicy::deterministic(trace.trajectory[k - 1], mdp.n_actions()));
            const ValueFn next = evaluate(mdp, StochasticPolicy::deterministic(trace.trajectory[k], mdp.n_actions()));
            EXPECT_TRUE(((next - prev).array() >= -1e-10).all());
        }
        EXPECT_LE((trace.value - optimal_solve(mdp).value).lpNorm<Eigen::Infinity>(), 1e-8);
    }
}

TEST(Mdp, GreedyTiesPickLowestIndex) {
    RowVector scores(4);
    scores << 1.0, 3.0, 3.0, 2.0;
    EXPECT_EQ(argmax_lowest(scores), 1);
    scores << 5.0, 5.0 * (1 + 1e-14), 4.0, 5.0;
    EXPECT_EQ(argmax_lowest(scores), 0);
    scores << 0.0, 0.0, 0.0, 0.0;
    EXPECT_EQ(argmax_lowest(scores), 0);
}

TEST(Mdp, DensityRatioConventions) {
    RowVector mu(3), nu(3);
    mu << 0.5, 0.5, 0.0;
    nu << 0.25, 0.75, 0.0;
    EXPECT_DOUBLE_EQ(density_ratio_norm(mu, nu), 2.0);  // 0/0 contributes nothing
    nu << 0.0, 1.0, 0.0;
    EXPECT_TRUE(std::isinf(density_ratio_norm(mu, nu)));
    EXPECT_DOUBLE_EQ(density_ratio_norm(nu, nu), 1.0);
}

TEST(Mdp, ValueDifferenceIdentityProperty) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 200; ++trial) {
        const Mdp mdp = random_mdp(rng, 10, 4);
        const StochasticPolicy pi = random_policy(rng, mdp.n_states(), mdp.n_actions());
        const StochasticPolicy pi_prime = random_policy(rng, mdp.n_states(), mdp.n_actions());
        EXPECT_LE(value_difference_identity_residual(mdp, pi, pi_prime), 1e-9);
        EXPECT_LE(value_difference_identity_residual(mdp, pi, pi), 1e-12);
    }
}

TEST(Mdp, DecodeAndCount) {
    EXPECT_EQ(decode_policy(0, 3, 2), (Actions{0, 0, 0}));
    EXPECT_EQ(decode_policy(1, 3, 2), (Actions{1, 0, 0}));
    EXPECT_EQ(decode_policy(6, 3, 2), (Actions{0, 1, 1}));
    EXPECT_EQ(deterministic_policy_count(3, 2, 100), 8u);
    EXPECT_EQ(deterministic_policy_count(20, 4, 4096), 4097u);
    EXPECT_NE(policy_hash({0, 1}), policy_hash({1, 0}));
}
