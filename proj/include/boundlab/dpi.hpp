#pragma once

#include <optional>
#include <vector>

#include "boundlab/policy_space.hpp"

namespace boundlab {

/// Deterministic policy set searched by direct policy iteration: either every
/// deterministic policy or an explicit list.
class DeterministicPolicySet {
public:
    static DeterministicPolicySet all(int n_states, int n_actions);
    static DeterministicPolicySet listed(int n_states, int n_actions, std::vector<Actions> policies);

    bool is_full() const noexcept { return full_; }
    int n_states() const noexcept { return n_states_; }
    int n_actions() const noexcept { return n_actions_; }

    /// Explicit members; for the full set they are enumerated on demand (throws
    /// when there are more than cap of them).
    std::vector<Actions> members(std::size_t cap = default_enumeration_cap) const;
    bool contains(const Actions& actions) const;

    /// Convex hull of the members, as a search space for local policy search.
    PolicySpace hull(std::size_t cap = default_enumeration_cap) const;

private:
    DeterministicPolicySet(bool full, int n_states, int n_actions, std::vector<Actions> policies);

    bool full_;
    int n_states_;
    int n_actions_;
    std::vector<Actions> policies_;
};

/// Exact DPI step: argmax over the set of nu T_{pi'} v_{pi_k}. For the full set
/// each state with nu(s) > 0 takes its greedy action and every other state
/// takes action 0.
Actions dpi_step(const Mdp& mdp, const Actions& pi_k, const OccupancyWeights& nu,
                 const DeterministicPolicySet& vertex_set);

struct DpiResult {
    Actions final_policy;
    std::vector<Actions> policy_sequence;
    std::vector<double> loss_sequence;  ///< mu (v_* - v_{pi_k})
    bool cycle_detected = false;        ///< terminal repeat visits more than one policy
    std::size_t cycle_start = 0;        ///< first index of the terminal cycle
    double limsup_loss = 0.0;
};

DpiResult run_dpi(const Mdp& mdp, const OccupancyWeights& nu, const OccupancyWeights& mu,
                  const DeterministicPolicySet& vertex_set, const Actions& init,
                  int max_iters = 10000);

}  // namespace boundlab
