#include "boundlab/garnet.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "boundlab/errors.hpp"

namespace boundlab {

void validate(const GarnetSpec& spec) {
    if (spec.n_states < 1 || spec.n_actions < 1) throw InvalidArgument("garnet: empty dimensions");
    if (spec.branching < 1 || spec.branching > spec.n_states)
        throw InvalidArgument("garnet: branching must lie in [1, n_states]");
    if (!(spec.sparsity >= 0.0 && spec.sparsity <= 1.0))
        throw InvalidArgument("garnet: sparsity must lie in [0, 1]");
    if (!(spec.discount >= 0.0 && spec.discount < 1.0))
        throw InvalidArgument("garnet: discount must lie in [0, 1)");
}

Mdp generate_garnet(const GarnetSpec& spec) {
    validate(spec);
    const int S = spec.n_states;
    const int A = spec.n_actions;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    RowMatrix kernel = RowMatrix::Zero(static_cast<Eigen::Index>(S) * A, S);
    Matrix reward(S, A);
    std::vector<int> states(S);
    std::vector<double> cuts;
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            // Partial Fisher-Yates: the first `branching` entries are the successors.
            std::iota(states.begin(), states.end(), 0);
            for (int k = 0; k < spec.branching; ++k) {
                std::uniform_int_distribution<int> pick(k, S - 1);
                std::swap(states[k], states[pick(rng)]);
            }
            cuts.assign(1, 0.0);
            for (int k = 1; k < spec.branching; ++k) cuts.push_back(unit(rng));
            std::sort(cuts.begin() + 1, cuts.end());
            cuts.push_back(1.0);
            const Eigen::Index row = static_cast<Eigen::Index>(s) * A + a;
            for (int k = 0; k < spec.branching; ++k) kernel(row, states[k]) = cuts[k + 1] - cuts[k];

            const double r = normal(rng);
            reward(s, a) = unit(rng) < spec.sparsity ? 0.0 : r;
        }
    }
    return Mdp(S, A, spec.discount, std::move(kernel), std::move(reward));
}

}  // namespace boundlab
