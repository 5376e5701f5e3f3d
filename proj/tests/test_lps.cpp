#include <gtest/gtest.h>

#include "boundlab/bounds.hpp"
#include "boundlab/errors.hpp"
#include "boundlab/lps.hpp"
#include "boundlab/reference.hpp"
#include "support/generators.hpp"

using namespace boundlab;
using namespace boundlab::testing;

TEST(Lps, DerivativeMatchesFiniteDifference) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        // At least two actions so the derivative is not identically zero.
        const int S = std::uniform_int_distribution<int>(2, 6)(rng);
        const int A = std::uniform_int_distribution<int>(2, 3)(rng);
        const Mdp mdp = random_mdp(rng, S, A, trial % 2 == 0 ? 0.9 : 0.5);
        const StochasticPolicy pi = random_policy(rng, mdp.n_states(), mdp.n_actions());
        const StochasticPolicy pi_prime = random_policy(rng, mdp.n_states(), mdp.n_actions());
        const OccupancyWeights nu = random_distribution(rng, mdp.n_states());
        const double analytic = directional_derivative(mdp, pi, pi_prime, nu);
        const double fd = reference::central_difference(mdp, nu.weights(), pi.probs(), pi_prime.probs(), 1e-6);
        EXPECT_LE(std::abs(fd - analytic), 1e-5 * std::max(std::abs(analytic), 1e-3));
    }
}

TEST(Lps, DerivativeVanishesTowardsSelfAndAtOptimum) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 30; ++trial) {
        const Mdp mdp = random_mdp(rng, 6, 3);
        const int S = mdp.n_states();
        const int A = mdp.n_actions();
        const StochasticPolicy pi = random_policy(rng, S, A);
        const OccupancyWeights nu = random_distribution(rng, S);
        EXPECT_NEAR(directional_derivative(mdp, pi, pi, nu), 0.0, 1e-10);
        const StochasticPolicy star = optimal_solve(mdp).policy;
        EXPECT_LE(directional_derivative(mdp, star, random_policy(rng, S, A), nu), 1e-10);
        EXPECT_LE(fw_certificate(mdp, star, nu, PolicySpace::full_simplex(S, A)).gap, 1e-10);
    }
}

TEST(Lps, CertificateEqualsEnumeratedMaximum) {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 30; ++trial) {
        const Mdp mdp = random_mdp(rng, 4, 3);
        const int S = mdp.n_states();
        const int A = mdp.n_actions();
        const StochasticPolicy pi = random_policy(rng, S, A);
        const OccupancyWeights nu = random_distribution(rng, S);
        const Certificate cert = fw_certificate(mdp, pi, nu, PolicySpace::full_simplex(S, A));
        double best = -1e300;
        for (const Actions& a : all_actions(S, A))
            best = std::max(best, directional_derivative(mdp, pi, StochasticPolicy::deterministic(a, A), nu));
        EXPECT_NEAR(cert.gap, best, 1e-10);
        for (int k = 0; k < 50; ++k)
            EXPECT_LE(directional_derivative(mdp, pi, random_policy(rng, S, A), nu), cert.gap + 1e-10);
    }
}

TEST(Lps, SingleVertexHullHasZeroGap) {
    std::mt19937_64 rng(34);
    const Mdp mdp = random_mdp(rng, 4, 3, 0.9);
    const Actions a = random_actions(rng, 4, 3);
    const PolicySpace single = PolicySpace::convex_hull(4, 3, {a});
    const Certificate cert =
        fw_certificate(mdp, StochasticPolicy::deterministic(a, 3), OccupancyWeights::uniform(4), single);
    EXPECT_NEAR(cert.gap, 0.0, 1e-12);
}

TEST(Lps, CertificateRejectsOutsidePolicy) {
    std::mt19937_64 rng(35);
    const Mdp mdp = random_mdp(rng, 3, 2, 0.9);
    const PolicySpace capped = PolicySpace::capped_simplex(3, 2, 0.2);
    const int zeros[] = {0, 0, 0};
    EXPECT_THROW(fw_certificate(mdp, StochasticPolicy::deterministic(zeros, 2), OccupancyWeights::uniform(3), capped),
                 InvalidArgument);
}

TEST(Lps, LineSearchBeatsGrid) {
    std::mt19937_64 rng(36);
    for (int trial = 0; trial < 40; ++trial) {
        const Mdp mdp = random_mdp(rng, 5, 3);
        const int S = mdp.n_states();
        const int A = mdp.n_actions();
        const StochasticPolicy pi = random_policy(rng, S, A);
        const StochasticPolicy dir = random_policy(rng, S, A);
        const OccupancyWeights nu = random_distribution(rng, S);
        const LineSearchResult ls = line_search(mdp, pi, dir, nu);
        EXPECT_GE(ls.alpha, 0.0);
        EXPECT_LE(ls.alpha, 1.0);
        EXPECT_GE(ls.value, objective(mdp, nu, pi));
        for (int k = 0; k <= 100; ++k)
            EXPECT_GE(ls.value, objective(mdp, nu, mix(pi, dir, k / 100.0)) - 1e-9);
    }
}

TEST(Lps, OneStateLineSearchTakesFullStep) {
    const double t[] = {1.0, 1.0};
    const double r[] = {0.0, 1.0};
    const Mdp mdp(1, 2, 0.9, t, r);
    const int a0[] = {0};
    const int a1[] = {1};
    const LineSearchResult ls = line_search(mdp, StochasticPolicy::deterministic(a0, 2),
                                            StochasticPolicy::deterministic(a1, 2), OccupancyWeights::uniform(1));
    EXPECT_NEAR(ls.alpha, 1.0, 1e-8);
    EXPECT_NEAR(ls.value, 10.0, 1e-7);
}

TEST(Lps, LineSearchTowardsSelfKeepsValue) {
    std::mt19937_64 rng(37);
    const Mdp mdp = random_mdp(rng, 4, 2, 0.9);
    const StochasticPolicy pi = random_policy(rng, 4, 2);
    const OccupancyWeights nu = OccupancyWeights::uniform(4);
    EXPECT_NEAR(line_search(mdp, pi, pi, nu).value, objective(mdp, nu, pi), 1e-12);
}

TEST(Lps, LocalSearchCertifiesAndAscends) {
    std::mt19937_64 rng(38);
    for (int trial = 0; trial < 30; ++trial) {
        const Mdp mdp = random_mdp(rng, 5, 3);
        const int S = mdp.n_states();
        const int A = mdp.n_actions();
        const OccupancyWeights nu = random_distribution(rng, S);
        std::vector<Actions> v{random_actions(rng, S, A), random_actions(rng, S, A), random_actions(rng, S, A)};
        for (const PolicySpace& space : {PolicySpace::full_simplex(S, A), PolicySpace::capped_simplex(S, A, 0.2 / A),
                                         PolicySpace::convex_hull(S, A, v)}) {
            LpsOptions o;
            o.eps = 1e-8;
            o.init_seed = trial;
            const LpsResult r = local_search(mdp, nu, space, o);
            EXPECT_EQ(r.termination, Termination::gap_reached) << space.name();
            EXPECT_LE(r.fw_gap, 1e-8);
            EXPECT_TRUE(contains(space, r.policy));
            for (std::size_t k = 1; k < r.objective_trace.size(); ++k)
                EXPECT_GE(r.objective_trace[k].objective, r.objective_trace[k - 1].objective - 1e-12);
            // Local optimality: d-weighted greedy slack is (1 - gamma) times the gap.
            const double slack = relaxed_greedy_slack(mdp, r.policy, occupancy(mdp, nu, r.policy), space);
            EXPECT_NEAR(slack, (1.0 - mdp.discount()) * r.fw_gap, 1e-12);
        }
    }
}

TEST(Lps, CappedSimplexRespectsFloor) {
    std::mt19937_64 rng(39);
    const Mdp mdp = random_mdp(rng, 2, 2, 0.9);
    const PolicySpace space = PolicySpace::capped_simplex(2, 2, 0.2);
    const LpsResult r = local_search(mdp, OccupancyWeights::uniform(2), space, {});
    EXPECT_LE(r.fw_gap, 1e-8);
    EXPECT_TRUE(contains(space, r.policy));
    EXPECT_GE(r.policy.probs().minCoeff(), 0.2 - 1e-12);
}

TEST(Lps, FullSimplexReachesOptimumWithPositiveNu) {
    std::mt19937_64 rng(40);
    for (int trial = 0; trial < 30; ++trial) {
        const Mdp mdp = random_mdp(rng, 6, 3);
        const int S = mdp.n_states();
        LpsOptions o;
        o.eps = 1e-10;
        const LpsResult r = local_search(mdp, OccupancyWeights::uniform(S), PolicySpace::full_simplex(S, mdp.n_actions()), o);
        const Vector loss = optimal_solve(mdp).value - evaluate(mdp, r.policy);
        EXPECT_LE(loss.maxCoeff(), 1e-6);
    }
}

TEST(Lps, InvalidArguments) {
    std::mt19937_64 rng(41);
    const Mdp mdp = random_mdp(rng, 3, 2, 0.9);
    LpsOptions o;
    o.eps = 0.0;
    EXPECT_THROW(local_search(mdp, OccupancyWeights::uniform(3), PolicySpace::full_simplex(3, 2), o), InvalidArgument);
    o.eps = 1e-6;
    o.init = StochasticPolicy::deterministic(std::vector<int>{0, 0, 0}, 2);
    EXPECT_THROW(local_search(mdp, OccupancyWeights::uniform(3), PolicySpace::capped_simplex(3, 2, 0.1), o),
                 InvalidArgument);
}
