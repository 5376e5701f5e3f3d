#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "boundlab/mdp.hpp"

namespace boundlab {

/**
 * Convex set of stochastic policies searched by local policy search.
 *
 *  - full_simplex:   every stochastic policy.
 *  - capped_simplex: every pi with pi(a|s) >= delta; requires delta * A <= 1.
 *  - convex_hull:    convex combinations (with weights shared across states)
 *                    of an explicit list of deterministic vertex policies.
 */
class PolicySpace {
public:
    enum class Kind { full_simplex, capped_simplex, convex_hull };

    static PolicySpace full_simplex(int n_states, int n_actions);
    static PolicySpace capped_simplex(int n_states, int n_actions, double delta);
    static PolicySpace convex_hull(int n_states, int n_actions, std::vector<Actions> vertices);

    Kind kind() const noexcept { return kind_; }
    int n_states() const noexcept { return n_states_; }
    int n_actions() const noexcept { return n_actions_; }
    double delta() const noexcept { return delta_; }
    const std::vector<Actions>& vertices() const noexcept { return vertices_; }

    std::string name() const;

    /// Number of extreme points, saturating at cap + 1.
    std::size_t extreme_point_count(std::size_t cap = default_enumeration_cap) const;

    /// k-th extreme point. Product spaces order them by decode_policy(k).
    StochasticPolicy extreme_point(std::uint64_t k) const;

    /// Extreme point selected by one action per state (product spaces) or the
    /// policy whose single chosen action is raised to its cap.
    StochasticPolicy product_vertex(const Actions& actions) const;

    /// Uniform policy for the product spaces, uniform vertex mixture for hulls.
    StochasticPolicy default_policy() const;

    /// Dirichlet(1) draw mapped into the space: per-state rows for product
    /// spaces, vertex weights for hulls.
    StochasticPolicy sample(std::mt19937_64& rng) const;

    /// Policy given by vertex weights (hull only).
    StochasticPolicy hull_point(const Vector& weights) const;

private:
    PolicySpace(Kind kind, int n_states, int n_actions, double delta, std::vector<Actions> vertices);

    Kind kind_;
    int n_states_;
    int n_actions_;
    double delta_ = 0.0;
    std::vector<Actions> vertices_;
};

void require_shape(const PolicySpace& space, const Mdp& mdp);

/// (1 - alpha) pi + alpha pi_prime, row by row.
StochasticPolicy mix(const StochasticPolicy& pi, const StochasticPolicy& pi_prime, double alpha);

/// Membership within tolerance; hulls are decided by a feasibility LP.
bool contains(const PolicySpace& space, const StochasticPolicy& pi, double tolerance = 1e-9);

/// Vertex weights expressing pi as a hull point, or nullopt when pi lies outside.
std::optional<Vector> hull_weights(const PolicySpace& space, const StochasticPolicy& pi,
                                   double tolerance = 1e-9);

/// argmax over the space of sum_{s,a} weights(s,a) pi(a|s); always an extreme point.
StochasticPolicy linear_maximizer(const PolicySpace& space, const Matrix& weights);

/// Value of the linear objective at pi.
double linear_objective(const Matrix& weights, const StochasticPolicy& pi);

struct GreedyComplexityEstimate {
    double lower_bound = 0.0;
    StochasticPolicy candidate_argmax_policy;
    int n_restarts = 0;
    int n_vertices_scanned = 0;
    bool exact = false;    ///< only for spaces collapsing to one point or exhaustive scans
    std::string method;
};

struct ComplexityOptions {
    int restarts = 8;
    std::uint64_t seed = 0;
    std::size_t enumeration_cap = default_enumeration_cap;
    int max_sweeps = 200;
};

/// Instance gap at pi: d_{nu,pi} T v_pi - max_{pi' in space} d_{nu,pi} T_{pi'} v_pi.
double greedy_shortfall(const PolicySpace& space, const Mdp& mdp, const OccupancyWeights& nu,
                        const StochasticPolicy& pi);

/// Lower bound on max_pi min_pi' d_{nu,pi}(T v_pi - T_pi' v_pi) over the space.
GreedyComplexityEstimate greedy_complexity(const PolicySpace& space, const Mdp& mdp,
                                           const OccupancyWeights& nu,
                                           const ComplexityOptions& options = {});

/// max over vertices of nu T v_pi - max over vertices of nu T_pi' v_pi (hulls only);
/// exact when the vertex count is within the enumeration cap.
GreedyComplexityEstimate dpi_greedy_complexity(const PolicySpace& space, const Mdp& mdp,
                                               const OccupancyWeights& nu,
                                               const ComplexityOptions& options = {});

/// Dirichlet(1) row of the given length.
Vector dirichlet_one(std::mt19937_64& rng, int length);

}  // namespace boundlab
