#include "boundlab/dpi.hpp"

#include <algorithm>
#include <unordered_map>

#include "boundlab/errors.hpp"

namespace boundlab {

namespace {

struct ActionsHash {
    std::size_t operator()(const Actions& a) const noexcept {
        return static_cast<std::size_t>(policy_hash(a));
    }
};

}  // namespace

DeterministicPolicySet::DeterministicPolicySet(bool full, int n_states, int n_actions,
                                               std::vector<Actions> policies)
    : full_(full), n_states_(n_states), n_actions_(n_actions), policies_(std::move(policies)) {}

DeterministicPolicySet DeterministicPolicySet::all(int n_states, int n_actions) {
    if (n_states <= 0 || n_actions <= 0) throw InvalidArgument("policy set: empty dimensions");
    return DeterministicPolicySet(true, n_states, n_actions, {});
}

DeterministicPolicySet DeterministicPolicySet::listed(int n_states, int n_actions,
                                                      std::vector<Actions> policies) {
    if (policies.empty()) throw InvalidArgument("policy set: empty");
    // Validation is shared with the convex hull constructor.
    (void)PolicySpace::convex_hull(n_states, n_actions, policies);
    return DeterministicPolicySet(false, n_states, n_actions, std::move(policies));
}

std::vector<Actions> DeterministicPolicySet::members(std::size_t cap) const {
    if (!full_) return policies_;
    const std::size_t count = deterministic_policy_count(n_states_, n_actions_, cap);
    if (count > cap) throw InvalidArgument("policy set: too many deterministic policies to enumerate");
    std::vector<Actions> out;
    out.reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) out.push_back(decode_policy(k, n_states_, n_actions_));
    return out;
}

bool DeterministicPolicySet::contains(const Actions& actions) const {
    if (static_cast<int>(actions.size()) != n_states_) return false;
    if (full_)
        return std::all_of(actions.begin(), actions.end(),
                           [&](int a) { return a >= 0 && a < n_actions_; });
    return std::find(policies_.begin(), policies_.end(), actions) != policies_.end();
}

PolicySpace DeterministicPolicySet::hull(std::size_t cap) const {
    return PolicySpace::convex_hull(n_states_, n_actions_, members(cap));
}

Actions dpi_step(const Mdp& mdp, const Actions& pi_k, const OccupancyWeights& nu,
                 const DeterministicPolicySet& vertex_set) {
    if (vertex_set.n_states() != mdp.n_states() || vertex_set.n_actions() != mdp.n_actions())
        throw DimensionError("dpi_step: policy set shape does not match the MDP");
    require_shape(mdp, nu);
    const ValueFn v = evaluate(mdp, StochasticPolicy::deterministic(pi_k, mdp.n_actions()));
    const Matrix q = q_values(mdp, v);
    if (vertex_set.is_full()) {
        Actions next(mdp.n_states(), 0);
        for (int s = 0; s < mdp.n_states(); ++s)
            if (nu[s] > 0.0) next[s] = argmax_lowest(q.row(s));
        return next;
    }
    const std::vector<Actions> members = vertex_set.members();
    RowVector scores(static_cast<Eigen::Index>(members.size()));
    for (std::size_t k = 0; k < members.size(); ++k) {
        double value = 0.0;
        for (int s = 0; s < mdp.n_states(); ++s) value += nu[s] * q(s, members[k][s]);
        scores(static_cast<Eigen::Index>(k)) = value;
    }
    return members[argmax_lowest(scores)];
}

DpiResult run_dpi(const Mdp& mdp, const OccupancyWeights& nu, const OccupancyWeights& mu,
                  const DeterministicPolicySet& vertex_set, const Actions& init, int max_iters) {
    require_shape(mdp, mu);
    if (!vertex_set.contains(init)) throw InvalidArgument("run_dpi: init is not in the policy set");

    const ValueFn v_star = optimal_solve(mdp).value;
    auto loss = [&](const Actions& actions) {
        return mu.dot(v_star - evaluate(mdp, StochasticPolicy::deterministic(actions, mdp.n_actions())));
    };

    DpiResult out;
    std::unordered_map<Actions, std::size_t, ActionsHash> seen;
    out.policy_sequence.push_back(init);
    out.loss_sequence.push_back(loss(init));
    seen.emplace(init, 0);

    bool repeated = false;
    for (int k = 0; k < max_iters; ++k) {
        Actions next = dpi_step(mdp, out.policy_sequence.back(), nu, vertex_set);
        if (auto it = seen.find(next); it != seen.end()) {
            out.cycle_start = it->second;
            out.cycle_detected = out.cycle_start + 1 < out.policy_sequence.size();
            repeated = true;
            break;
        }
        seen.emplace(next, out.policy_sequence.size());
        out.loss_sequence.push_back(loss(next));
        out.policy_sequence.push_back(std::move(next));
    }
    // Without a repeat the last policy stands in for the limit.
    if (!repeated) out.cycle_start = out.policy_sequence.size() - 1;
    out.limsup_loss = *std::max_element(out.loss_sequence.begin() + static_cast<long>(out.cycle_start),
                                        out.loss_sequence.end());
    out.final_policy = out.policy_sequence.back();
    return out;
}

}  // namespace boundlab
