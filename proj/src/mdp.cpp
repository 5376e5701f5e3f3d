#include "boundlab/mdp.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <set>

#include "boundlab/errors.hpp"

namespace boundlab {

namespace {

void check_row_distribution(const Eigen::Ref<const RowVector>& row, const char* what) {
    if (!row.allFinite())
        throw InvalidArgument(std::string(what) + ": non-finite probability");
    if ((row.array() < -tol::structural).any())
        throw InvalidArgument(std::string(what) + ": negative probability");
    if (std::abs(row.sum() - 1.0) > tol::structural)
        throw InvalidArgument(std::string(what) + ": row does not sum to one");
}

}  // namespace

// ---------------------------------------------------------------------------
// Mdp

Mdp::Mdp(int n_states, int n_actions, double discount, std::span<const double> transition,
         std::span<const double> reward)
    : n_states_(n_states), n_actions_(n_actions), discount_(discount) {
    if (n_states <= 0 || n_actions <= 0)
        throw InvalidArgument("Mdp: state and action counts must be positive");
    const auto rows = static_cast<std::size_t>(n_states) * n_actions;
    if (transition.size() != rows * n_states)
        throw DimensionError("Mdp: transition table has wrong size");
    if (reward.size() != rows) throw DimensionError("Mdp: reward table has wrong size");
    kernel_.resize(static_cast<Eigen::Index>(rows), n_states);
    for (std::size_t r = 0; r < rows; ++r)
        for (int t = 0; t < n_states; ++t) kernel_(r, t) = transition[r * n_states + t];
    reward_.resize(n_states, n_actions);
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) reward_(s, a) = reward[row(s, a)];
    validate();
}

Mdp::Mdp(int n_states, int n_actions, double discount, RowMatrix kernel, Matrix reward)
    : n_states_(n_states),
      n_actions_(n_actions),
      discount_(discount),
      kernel_(std::move(kernel)),
      reward_(std::move(reward)) {
    if (n_states <= 0 || n_actions <= 0)
        throw InvalidArgument("Mdp: state and action counts must be positive");
    if (kernel_.rows() != static_cast<Eigen::Index>(n_states) * n_actions ||
        kernel_.cols() != n_states)
        throw DimensionError("Mdp: kernel must be (S*A) x S");
    if (reward_.rows() != n_states || reward_.cols() != n_actions)
        throw DimensionError("Mdp: reward must be S x A");
    validate();
}

void Mdp::validate() const {
    if (!(discount_ >= 0.0 && discount_ < 1.0))
        throw InvalidArgument("Mdp: discount must lie in [0, 1)");
    if (!reward_.allFinite()) throw InvalidArgument("Mdp: rewards must be finite");
    for (Eigen::Index r = 0; r < kernel_.rows(); ++r) check_row_distribution(kernel_.row(r), "Mdp");
}

Mdp Mdp::with_discount(double discount) const {
    return Mdp(n_states_, n_actions_, discount, kernel_, reward_);
}

bool operator==(const Mdp& lhs, const Mdp& rhs) {
    return lhs.n_states_ == rhs.n_states_ && lhs.n_actions_ == rhs.n_actions_ &&
           lhs.discount_ == rhs.discount_ && lhs.kernel_ == rhs.kernel_ &&
           lhs.reward_ == rhs.reward_;
}

// ---------------------------------------------------------------------------
// StochasticPolicy

StochasticPolicy::StochasticPolicy(Matrix probs) : probs_(std::move(probs)) {
    if (probs_.rows() == 0 || probs_.cols() == 0)
        throw DimensionError("StochasticPolicy: empty table");
    for (Eigen::Index s = 0; s < probs_.rows(); ++s)
        check_row_distribution(probs_.row(s), "StochasticPolicy");
}

StochasticPolicy StochasticPolicy::uniform(int n_states, int n_actions) {
    return StochasticPolicy(Matrix::Constant(n_states, n_actions, 1.0 / n_actions));
}

StochasticPolicy StochasticPolicy::deterministic(std::span<const int> actions, int n_actions) {
    Matrix probs = Matrix::Zero(static_cast<Eigen::Index>(actions.size()), n_actions);
    for (std::size_t s = 0; s < actions.size(); ++s) {
        if (actions[s] < 0 || actions[s] >= n_actions)
            throw InvalidArgument("StochasticPolicy: action index out of range");
        probs(static_cast<Eigen::Index>(s), actions[s]) = 1.0;
    }
    return StochasticPolicy(std::move(probs));
}

bool StochasticPolicy::is_deterministic(double tolerance) const {
    for (Eigen::Index s = 0; s < probs_.rows(); ++s)
        if (probs_.row(s).maxCoeff() < 1.0 - tolerance) return false;
    return true;
}

Actions StochasticPolicy::modal_actions() const {
    Actions out(probs_.rows());
    for (Eigen::Index s = 0; s < probs_.rows(); ++s) {
        Eigen::Index best = 0;
        for (Eigen::Index a = 1; a < probs_.cols(); ++a)
            if (probs_(s, a) > probs_(s, best)) best = a;
        out[s] = static_cast<int>(best);
    }
    return out;
}

// ---------------------------------------------------------------------------
// OccupancyWeights

OccupancyWeights::OccupancyWeights(RowVector weights) : weights_(std::move(weights)) {
    if (weights_.size() == 0) throw DimensionError("OccupancyWeights: empty");
    if (!weights_.allFinite()) throw InvalidArgument("OccupancyWeights: non-finite weight");
    for (Eigen::Index s = 0; s < weights_.size(); ++s) {
        if (weights_(s) < -tol::structural)
            throw InvalidArgument("OccupancyWeights: negative weight");
        if (weights_(s) < 0.0) weights_(s) = 0.0;
    }
}

OccupancyWeights OccupancyWeights::uniform(int n_states) {
    return OccupancyWeights(RowVector::Constant(n_states, 1.0 / n_states));
}

OccupancyWeights OccupancyWeights::point(int n_states, int state) {
    if (state < 0 || state >= n_states) throw InvalidArgument("point mass outside state range");
    RowVector w = RowVector::Zero(n_states);
    w(state) = 1.0;
    return OccupancyWeights(std::move(w));
}

bool OccupancyWeights::is_distribution(double tolerance) const {
    return std::abs(weights_.sum() - 1.0) <= tolerance;
}

// ---------------------------------------------------------------------------
// operators

void require_shape(const Mdp& mdp, const StochasticPolicy& pi) {
    if (pi.n_states() != mdp.n_states() || pi.n_actions() != mdp.n_actions())
        throw DimensionError("policy shape does not match the MDP");
}

void require_shape(const Mdp& mdp, const OccupancyWeights& w) {
    if (w.size() != mdp.n_states()) throw DimensionError("state weights do not match the MDP");
}

Vector reward_under(const Mdp& mdp, const StochasticPolicy& pi) {
    require_shape(mdp, pi);
    return mdp.rewards().cwiseProduct(pi.probs()).rowwise().sum();
}

Matrix transition_under(const Mdp& mdp, const StochasticPolicy& pi) {
    require_shape(mdp, pi);
    const int S = mdp.n_states();
    const int A = mdp.n_actions();
    Matrix out = Matrix::Zero(S, S);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            const double p = pi(s, a);
            if (p != 0.0) out.row(s) += p * mdp.kernel().row(mdp.row(s, a));
        }
    return out;
}

ValueFn bellman(const Mdp& mdp, const StochasticPolicy& pi, const ValueFn& v) {
    if (v.size() != mdp.n_states()) throw DimensionError("value function does not match the MDP");
    return reward_under(mdp, pi) + mdp.discount() * (transition_under(mdp, pi) * v);
}

Matrix q_values(const Mdp& mdp, const ValueFn& v) {
    if (v.size() != mdp.n_states()) throw DimensionError("value function does not match the MDP");
    const Vector next = mdp.kernel() * v;
    Matrix q = mdp.rewards();
    for (int s = 0; s < mdp.n_states(); ++s)
        for (int a = 0; a < mdp.n_actions(); ++a) q(s, a) += mdp.discount() * next(mdp.row(s, a));
    return q;
}

int argmax_lowest(const Eigen::Ref<const RowVector>& scores) {
    const double best = scores.maxCoeff();
    const double margin = tol::tie * (1.0 + std::abs(best));
    for (Eigen::Index a = 0; a < scores.size(); ++a)
        if (scores(a) >= best - margin) return static_cast<int>(a);
    return 0;
}

GreedyStep bellman_optimal(const Mdp& mdp, const ValueFn& v) {
    const Matrix q = q_values(mdp, v);
    ValueFn value(mdp.n_states());
    Actions actions(mdp.n_states());
    for (int s = 0; s < mdp.n_states(); ++s) {
        value(s) = q.row(s).maxCoeff();
        actions[s] = argmax_lowest(q.row(s));
    }
    auto policy = StochasticPolicy::deterministic(actions, mdp.n_actions());
    return {std::move(value), std::move(actions), std::move(policy)};
}

ValueFn evaluate(const Mdp& mdp, const StochasticPolicy& pi) {
    const Matrix p = transition_under(mdp, pi);
    const Vector r = reward_under(mdp, pi);
    const int S = mdp.n_states();
    const Matrix system = Matrix::Identity(S, S) - mdp.discount() * p;
    ValueFn v = system.partialPivLu().solve(r);
    const ValueFn tv = r + mdp.discount() * (p * v);
    const double residual = (v - tv).lpNorm<Eigen::Infinity>();
    if (!v.allFinite() || residual > tol::numerical * (1.0 + v.lpNorm<Eigen::Infinity>()))
        throw SolverError("evaluate: fixed-point residual check failed");
    return v;
}

OccupancyWeights occupancy(const Mdp& mdp, const OccupancyWeights& mu,
                           const StochasticPolicy& pi) {
    require_shape(mdp, mu);
    if (!mu.is_distribution()) throw InvalidArgument("occupancy: mu must be a distribution");
    const int S = mdp.n_states();
    const double gamma = mdp.discount();
    const Matrix system = Matrix::Identity(S, S) - gamma * transition_under(mdp, pi);
    const Vector x = system.transpose().partialPivLu().solve(mu.weights().transpose());
    return OccupancyWeights(((1.0 - gamma) * x).transpose());
}

PolicyIterationTrace policy_iteration(const Mdp& mdp, const Actions& init) {
    if (static_cast<int>(init.size()) != mdp.n_states())
        throw DimensionError("policy_iteration: init has wrong length");
    PolicyIterationTrace out{ValueFn(), init, StochasticPolicy::deterministic(init, mdp.n_actions()),
                             {init}};
    std::set<Actions> seen{init};
    // Howard PI on a finite MDP improves strictly until it repeats; the cap is
    // only a guard against tie-induced oscillation.
    for (int iter = 0; iter < 100000; ++iter) {
        out.value = evaluate(mdp, out.policy);
        GreedyStep greedy = bellman_optimal(mdp, out.value);
        if (greedy.actions == out.actions) break;
        const bool repeated = !seen.insert(greedy.actions).second;
        out.trajectory.push_back(greedy.actions);
        out.actions = std::move(greedy.actions);
        out.policy = std::move(greedy.policy);
        if (repeated) {
            out.value = evaluate(mdp, out.policy);
            break;
        }
    }
    return out;
}

OptimalSolution optimal_solve(const Mdp& mdp) {
    PolicyIterationTrace trace = policy_iteration(mdp, Actions(mdp.n_states(), 0));
    return {std::move(trace.value), std::move(trace.actions), std::move(trace.policy),
            static_cast<int>(trace.trajectory.size()) - 1};
}

double density_ratio_norm(const RowVector& mu, const RowVector& nu) {
    if (mu.size() != nu.size()) throw DimensionError("density_ratio_norm: size mismatch");
    double out = 0.0;
    for (Eigen::Index s = 0; s < mu.size(); ++s) {
        if (mu(s) <= 0.0) continue;
        if (nu(s) <= 0.0) return std::numeric_limits<double>::infinity();
        out = std::max(out, mu(s) / nu(s));
    }
    return out;
}

double density_ratio_norm(const OccupancyWeights& mu, const OccupancyWeights& nu) {
    return density_ratio_norm(mu.weights(), nu.weights());
}

double value_difference_identity_residual(const Mdp& mdp, const StochasticPolicy& pi,
                                          const StochasticPolicy& pi_prime) {
    const ValueFn v = evaluate(mdp, pi);
    const ValueFn v_prime = evaluate(mdp, pi_prime);
    const int S = mdp.n_states();
    const Matrix system = Matrix::Identity(S, S) - mdp.discount() * transition_under(mdp, pi_prime);
    const Vector advantage = bellman(mdp, pi_prime, v) - v;
    const Vector rhs = system.partialPivLu().solve(advantage);
    return ((v_prime - v) - rhs).lpNorm<Eigen::Infinity>();
}

std::size_t deterministic_policy_count(int n_states, int n_actions, std::size_t cap) {
    std::size_t count = 1;
    for (int s = 0; s < n_states; ++s) {
        count *= static_cast<std::size_t>(n_actions);
        if (count > cap) return cap + 1;
    }
    return count;
}

Actions decode_policy(std::uint64_t index, int n_states, int n_actions) {
    Actions out(n_states);
    for (int s = 0; s < n_states; ++s) {
        out[s] = static_cast<int>(index % static_cast<std::uint64_t>(n_actions));
        index /= static_cast<std::uint64_t>(n_actions);
    }
    return out;
}

std::uint64_t policy_hash(const Actions& actions) {
    std::uint64_t h = 1469598103934665603ULL;
    for (int a : actions) {
        auto x = static_cast<std::uint32_t>(a);
        for (int byte = 0; byte < 4; ++byte) {
            h ^= (x >> (8 * byte)) & 0xffU;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

}  // namespace boundlab
