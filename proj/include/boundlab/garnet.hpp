#pragma once

#include <cstdint>

#include "boundlab/mdp.hpp"

namespace boundlab {

/// Random Garnet-style MDP family.
struct GarnetSpec {
    int n_states = 5;
    int n_actions = 2;
    int branching = 2;       ///< reachable successors per (s,a), 1..n_states
    double sparsity = 0.0;   ///< probability that a reward is zeroed
    std::uint64_t seed = 0;
    double discount = 0.9;
};

void validate(const GarnetSpec& spec);

/// For each (s,a): `branching` distinct successors drawn uniformly, masses
/// from sorted-uniform stick breaking; rewards standard normal, each zeroed
/// with probability `sparsity`. Deterministic given the seed.
Mdp generate_garnet(const GarnetSpec& spec);

}  // namespace boundlab
