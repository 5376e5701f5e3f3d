#include <gtest/gtest.h>

#include "boundlab/bounds.hpp"
#include "boundlab/detail/simplex.hpp"
#include "boundlab/errors.hpp"
#include "boundlab/policy_space.hpp"
#include "support/generators.hpp"

using namespace boundlab;
using namespace boundlab::testing;

namespace {

StochasticPolicy rows(std::initializer_list<std::initializer_list<double>> r) {
    Matrix m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& row : r) {
        Eigen::Index j = 0;
        for (double x : row) m(i, j++) = x;
        ++i;
    }
    return StochasticPolicy(m);
}

std::vector<PolicySpace> spaces_for(std::mt19937_64& rng, int S, int A) {
    std::vector<PolicySpace> out{PolicySpace::full_simplex(S, A),
                                 PolicySpace::capped_simplex(S, A, 0.5 / A)};
    std::vector<Actions> v;
    for (int k = 0; k < 3; ++k) v.push_back(random_actions(rng, S, A));
    out.push_back(PolicySpace::convex_hull(S, A, v));
    return out;
}

}  // namespace

TEST(PolicySpace, ValidatesParameters) {
    EXPECT_THROW(PolicySpace::capped_simplex(2, 3, 0.4), InvalidArgument);
    EXPECT_THROW(PolicySpace::convex_hull(2, 2, {}), InvalidArgument);
    EXPECT_THROW(PolicySpace::convex_hull(2, 2, {{0, 2}}), std::invalid_argument);
    EXPECT_THROW(PolicySpace::convex_hull(2, 2, {{0}}), std::invalid_argument);
}

TEST(PolicySpace, MixEndpointsAndRange) {
    const StochasticPolicy a = rows({{1, 0}, {0.3, 0.7}});
    const StochasticPolicy b = rows({{0, 1}, {0.5, 0.5}});
    EXPECT_EQ(mix(a, b, 0.0), a);
    EXPECT_EQ(mix(a, b, 1.0), b);
    EXPECT_NEAR(mix(a, b, 0.5)(0, 0), 0.5, 1e-15);
    EXPECT_THROW(mix(a, b, -0.1), InvalidArgument);
    EXPECT_THROW(mix(a, b, 1.1), InvalidArgument);
}

TEST(PolicySpace, CappedMembership) {
    const PolicySpace space = PolicySpace::capped_simplex(2, 2, 0.2);
    EXPECT_TRUE(contains(space, rows({{0.2, 0.8}, {0.5, 0.5}})));
    EXPECT_FALSE(contains(space, rows({{0.1, 0.9}, {0.5, 0.5}})));
    EXPECT_TRUE(contains(PolicySpace::full_simplex(2, 2), rows({{0.0, 1.0}, {1.0, 0.0}})));
}

TEST(PolicySpace, HullMembershipSharesWeightsAcrossStates) {
    const PolicySpace hull = PolicySpace::convex_hull(2, 2, {{0, 0}, {1, 1}});
    EXPECT_TRUE(contains(hull, rows({{1, 0}, {1, 0}})));
    EXPECT_TRUE(contains(hull, rows({{0.3, 0.7}, {0.3, 0.7}})));
    // Each row is a valid mixture on its own, but not with the same weights.
    EXPECT_FALSE(contains(hull, rows({{0.3, 0.7}, {0.6, 0.4}})));
    EXPECT_FALSE(contains(hull, rows({{1, 0}, {0, 1}})));

    const PolicySpace three = PolicySpace::convex_hull(2, 3, {{0, 1}, {1, 2}, {2, 0}});
    EXPECT_TRUE(contains(three, three.hull_point(Vector::Constant(3, 1.0 / 3))));
    EXPECT_FALSE(contains(three, rows({{1, 0, 0}, {1, 0, 0}})));
}

TEST(PolicySpace, PhaseOneResidual) {
    Matrix a(2, 2);
    a << 1, 1, 1, -1;
    Vector b(2);
    b << 1, 0;
    EXPECT_NEAR(detail::phase_one_residual(a, b), 0.0, 1e-12);  // x = (0.5, 0.5)
    b << 1, 2;
    EXPECT_GT(detail::phase_one_residual(a, b), 0.5);  // x1 - x2 = 2 needs x1 >= 2 > 1
}

TEST(PolicySpace, SamplesLieInSpace) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const int S = 1 + trial % 4;
        const int A = 2 + trial % 3;
        for (const PolicySpace& space : spaces_for(rng, S, A)) {
            EXPECT_TRUE(contains(space, space.sample(rng))) << space.name();
            EXPECT_TRUE(contains(space, space.default_policy())) << space.name();
        }
    }
}

TEST(PolicySpace, LinearMaximizerMatchesEnumeration) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 60; ++trial) {
        const int S = 1 + trial % 4;
        const int A = 1 + trial % 3;
        const Matrix weights = Matrix::Random(S, A);
        for (const PolicySpace& space : spaces_for(rng, S, A)) {
            const StochasticPolicy best = linear_maximizer(space, weights);
            EXPECT_TRUE(contains(space, best));
            double enumerated = -1e300;
            const auto n = space.kind() == PolicySpace::Kind::convex_hull ? space.vertices().size()
                                                                         : space.extreme_point_count();
            for (std::uint64_t k = 0; k < n; ++k)
                enumerated = std::max(enumerated, linear_objective(weights, space.extreme_point(k)));
            EXPECT_NEAR(linear_objective(weights, best), enumerated, 1e-12) << space.name();
            // No sampled interior point beats it.
            for (int j = 0; j < 20; ++j)
                EXPECT_LE(linear_objective(weights, space.sample(rng)), enumerated + 1e-12);
        }
    }
}

TEST(PolicySpace, SingleVertexComplexityIsExact) {
    std::mt19937_64 rng(9);
    const Mdp mdp = random_mdp(rng, 4, 2, 0.9);
    const OccupancyWeights nu = OccupancyWeights::uniform(4);
    const Actions a = random_actions(rng, 4, 2);
    const PolicySpace single = PolicySpace::convex_hull(4, 2, {a});
    const GreedyComplexityEstimate e = greedy_complexity(single, mdp, nu);
    EXPECT_TRUE(e.exact);
    EXPECT_NEAR(e.lower_bound, greedy_shortfall(single, mdp, nu, StochasticPolicy::deterministic(a, 2)),
                1e-12);
    EXPECT_GE(e.lower_bound, 0.0);
}

TEST(PolicySpace, FullSimplexComplexityIsZero) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 10; ++trial) {
        const Mdp mdp = random_mdp(rng, 4, 3);
        const OccupancyWeights nu = random_distribution(rng, mdp.n_states());
        const auto e = greedy_complexity(PolicySpace::full_simplex(mdp.n_states(), mdp.n_actions()), mdp, nu);
        EXPECT_NEAR(e.lower_bound, 0.0, 1e-12);
    }
}

TEST(PolicySpace, ComplexityLowerBoundCoversVertices) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Mdp mdp = random_mdp(rng, 5, 3);
        const OccupancyWeights nu = random_distribution(rng, mdp.n_states());
        for (const PolicySpace& space : spaces_for(rng, mdp.n_states(), mdp.n_actions())) {
            const auto e = greedy_complexity(space, mdp, nu);
            EXPECT_NEAR(e.lower_bound,
                        std::max(0.0, greedy_shortfall(space, mdp, nu, e.candidate_argmax_policy)), 1e-12);
            if (space.kind() == PolicySpace::Kind::convex_hull) {
                for (const Actions& v : space.vertices())
                    EXPECT_GE(e.lower_bound + 1e-12,
                              greedy_shortfall(space, mdp, nu, StochasticPolicy::deterministic(v, mdp.n_actions())));
            }
        }
    }
}

TEST(PolicySpace, DpiComplexityMatchesBruteForce) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const Mdp mdp = random_mdp(rng, 5, 3);
        const int S = mdp.n_states();
        const int A = mdp.n_actions();
        const OccupancyWeights nu = random_distribution(rng, S);
        std::vector<Actions> vertices;
        for (int k = 0; k < 4; ++k) vertices.push_back(random_actions(rng, S, A));
        const PolicySpace hull = PolicySpace::convex_hull(S, A, vertices);
        double brute = -1e300;
        for (const Actions& v : vertices) {
            const ValueFn value = evaluate(mdp, StochasticPolicy::deterministic(v, A));
            const double top = nu.dot(q_values(mdp, value).rowwise().maxCoeff());
            double best = -1e300;
            for (const Actions& w : vertices)
                best = std::max(best, nu.dot(bellman(mdp, StochasticPolicy::deterministic(w, A), value)));
            brute = std::max(brute, top - best);
        }
        const auto e = dpi_greedy_complexity(hull, mdp, nu);
        EXPECT_TRUE(e.exact);
        EXPECT_NEAR(e.lower_bound, brute, 1e-10);
    }
}
