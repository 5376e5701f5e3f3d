#pragma once

#include <random>
#include <vector>

#include "boundlab/mdp.hpp"
#include "boundlab/policy_space.hpp"

namespace boundlab::testing {

// Dense random MDP; every transition row is a Dirichlet(1) draw, rewards
// uniform in [-1, 1].
inline Mdp random_mdp(std::mt19937_64& rng, int S, int A, double gamma) {
    RowMatrix kernel(static_cast<Eigen::Index>(S) * A, S);
    Matrix reward(S, A);
    std::uniform_real_distribution<double> r(-1.0, 1.0);
    for (Eigen::Index k = 0; k < kernel.rows(); ++k) kernel.row(k) = dirichlet_one(rng, S).transpose();
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) reward(s, a) = r(rng);
    return Mdp(S, A, gamma, std::move(kernel), std::move(reward));
}

inline Mdp random_mdp(std::mt19937_64& rng, int max_states = 6, int max_actions = 3) {
    static const double gammas[] = {0.5, 0.9, 0.99};
    const int S = std::uniform_int_distribution<int>(1, max_states)(rng);
    const int A = std::uniform_int_distribution<int>(1, max_actions)(rng);
    return random_mdp(rng, S, A, gammas[std::uniform_int_distribution<int>(0, 2)(rng)]);
}

inline StochasticPolicy random_policy(std::mt19937_64& rng, int S, int A) {
    return PolicySpace::full_simplex(S, A).sample(rng);
}

inline Actions random_actions(std::mt19937_64& rng, int S, int A) {
    std::uniform_int_distribution<int> pick(0, A - 1);
    Actions a(S);
    for (int& x : a) x = pick(rng);
    return a;
}

inline OccupancyWeights random_distribution(std::mt19937_64& rng, int S) {
    return OccupancyWeights(dirichlet_one(rng, S).transpose());
}

// All deterministic policies of a small MDP, in decode order.
inline std::vector<Actions> all_actions(int S, int A) {
    std::vector<Actions> out;
    const auto n = deterministic_policy_count(S, A, 1u << 16);
    for (std::uint64_t k = 0; k < n; ++k) out.push_back(decode_policy(k, S, A));
    return out;
}

}  // namespace boundlab::testing
