#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "boundlab/config.hpp"

namespace boundlab {

using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One action index per state.
using Actions = std::vector<int>;

/// Per-state value; column vector.
using ValueFn = Vector;

/**
 * Finite discounted MDP with a dense kernel.
 *
 * The kernel is stored as an (S*A) x S row-major matrix whose row s*A+a is
 * the next-state distribution of the pair (s,a). Every row is checked to be
 * a probability vector within tol::structural at construction.
 */
class Mdp {
public:
    /// transition is indexed [s][a][s'] (flattened), reward [s][a].
    Mdp(int n_states, int n_actions, double discount, std::span<const double> transition,
        std::span<const double> reward);

    Mdp(int n_states, int n_actions, double discount, RowMatrix kernel, Matrix reward);

    int n_states() const noexcept { return n_states_; }
    int n_actions() const noexcept { return n_actions_; }
    double discount() const noexcept { return discount_; }

    double transition(int s, int a, int next) const { return kernel_(row(s, a), next); }
    double reward(int s, int a) const { return reward_(s, a); }

    /// Rows indexed s*A+a.
    const RowMatrix& kernel() const noexcept { return kernel_; }
    /// S x A.
    const Matrix& rewards() const noexcept { return reward_; }

    Eigen::Index row(int s, int a) const noexcept {
        return static_cast<Eigen::Index>(s) * n_actions_ + a;
    }

    Mdp with_discount(double discount) const;

    double max_abs_reward() const { return reward_.cwiseAbs().maxCoeff(); }

    friend bool operator==(const Mdp& lhs, const Mdp& rhs);

private:
    void validate() const;

    int n_states_;
    int n_actions_;
    double discount_;
    RowMatrix kernel_;
    Matrix reward_;
};

/// Per-state distribution over actions, stored S x A.
class StochasticPolicy {
public:
    explicit StochasticPolicy(Matrix probs);

    static StochasticPolicy uniform(int n_states, int n_actions);
    static StochasticPolicy deterministic(std::span<const int> actions, int n_actions);

    int n_states() const noexcept { return static_cast<int>(probs_.rows()); }
    int n_actions() const noexcept { return static_cast<int>(probs_.cols()); }

    double operator()(int s, int a) const { return probs_(s, a); }
    const Matrix& probs() const noexcept { return probs_; }

    bool is_deterministic(double tolerance = tol::structural) const;

    /// Most probable action per state, lowest index on ties.
    Actions modal_actions() const;

    friend bool operator==(const StochasticPolicy& lhs, const StochasticPolicy& rhs) {
        return lhs.probs_ == rhs.probs_;
    }

private:
    Matrix probs_;
};

/// Nonnegative state weights with row-vector semantics (mu, nu, d_{mu,pi}).
class OccupancyWeights {
public:
    explicit OccupancyWeights(RowVector weights);

    static OccupancyWeights uniform(int n_states);
    static OccupancyWeights point(int n_states, int state);

    int size() const noexcept { return static_cast<int>(weights_.size()); }
    double operator[](int s) const { return weights_(s); }
    const RowVector& weights() const noexcept { return weights_; }

    double dot(const Vector& v) const { return weights_.dot(v); }
    double sum() const { return weights_.sum(); }
    bool is_distribution(double tolerance = tol::structural) const;
    bool strictly_positive() const { return (weights_.array() > 0.0).all(); }

private:
    RowVector weights_;
};

/// r_pi(s) = sum_a pi(a|s) r(s,a).
Vector reward_under(const Mdp& mdp, const StochasticPolicy& pi);

/// P_pi(s'|s) = sum_a pi(a|s) P(s'|s,a).
Matrix transition_under(const Mdp& mdp, const StochasticPolicy& pi);

/// T_pi v = r_pi + gamma P_pi v.
ValueFn bellman(const Mdp& mdp, const StochasticPolicy& pi, const ValueFn& v);

/// Q(s,a) = r(s,a) + gamma sum_s' P(s'|s,a) v(s'), S x A.
Matrix q_values(const Mdp& mdp, const ValueFn& v);

/// Lowest index whose score is within tol::tie (relative) of the row maximum.
int argmax_lowest(const Eigen::Ref<const RowVector>& scores);

struct GreedyStep {
    ValueFn value;           ///< T v
    Actions actions;         ///< greedy action per state
    StochasticPolicy policy; ///< indicator rows of actions
};

/// T v together with a deterministic greedy policy (lowest-index ties).
GreedyStep bellman_optimal(const Mdp& mdp, const ValueFn& v);

/// Solves (I - gamma P_pi) v = r_pi by dense LU; throws SolverError when the
/// fixed-point residual exceeds tol::numerical * (1 + |v|_inf).
ValueFn evaluate(const Mdp& mdp, const StochasticPolicy& pi);

/// d_{mu,pi} = (1-gamma) mu (I - gamma P_pi)^{-1}.
OccupancyWeights occupancy(const Mdp& mdp, const OccupancyWeights& mu, const StochasticPolicy& pi);

struct PolicyIterationTrace {
    ValueFn value;
    Actions actions;
    StochasticPolicy policy;
    std::vector<Actions> trajectory;  ///< every policy visited, starting with init
};

/// Howard policy iteration from init until the greedy policy repeats.
PolicyIterationTrace policy_iteration(const Mdp& mdp, const Actions& init);

struct OptimalSolution {
    ValueFn value;
    Actions actions;
    StochasticPolicy policy;
    int iterations = 0;
};

/// Exact optimal control by policy iteration started from the all-zero policy.
OptimalSolution optimal_solve(const Mdp& mdp);

/// max_s mu(s)/nu(s) with 0/0 = 0 and x/0 = +infinity.
double density_ratio_norm(const RowVector& mu, const RowVector& nu);
double density_ratio_norm(const OccupancyWeights& mu, const OccupancyWeights& nu);

/// |(v_pi' - v_pi) - (I - gamma P_pi')^{-1} (T_pi' v_pi - v_pi)|_inf.
double value_difference_identity_residual(const Mdp& mdp, const StochasticPolicy& pi,
                                          const StochasticPolicy& pi_prime);

/// Check that pi is shaped for mdp; throws DimensionError.
void require_shape(const Mdp& mdp, const StochasticPolicy& pi);
void require_shape(const Mdp& mdp, const OccupancyWeights& w);

/// Total number of deterministic policies, saturating at cap + 1.
std::size_t deterministic_policy_count(int n_states, int n_actions, std::size_t cap);

/// Mixed-radix decoding of a deterministic policy index (state 0 is the
/// least significant digit).
Actions decode_policy(std::uint64_t index, int n_states, int n_actions);

/// Stable FNV-1a hash of an action vector.
std::uint64_t policy_hash(const Actions& actions);

}  // namespace boundlab
