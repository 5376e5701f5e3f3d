#include "boundlab/policy_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "boundlab/detail/simplex.hpp"
#include "boundlab/errors.hpp"
#include "boundlab/kernels.hpp"

namespace boundlab {

PolicySpace::PolicySpace(Kind kind, int n_states, int n_actions, double delta,
                         std::vector<Actions> vertices)
    : kind_(kind),
      n_states_(n_states),
      n_actions_(n_actions),
      delta_(delta),
      vertices_(std::move(vertices)) {
    if (n_states <= 0 || n_actions <= 0) throw InvalidArgument("PolicySpace: empty dimensions");
}

PolicySpace PolicySpace::full_simplex(int n_states, int n_actions) {
    return PolicySpace(Kind::full_simplex, n_states, n_actions, 0.0, {});
}

PolicySpace PolicySpace::capped_simplex(int n_states, int n_actions, double delta) {
    if (!(delta >= 0.0) || delta * n_actions > 1.0 + tol::structural)
        throw InvalidArgument("capped_simplex: floor must satisfy 0 <= delta and delta * A <= 1");
    return PolicySpace(Kind::capped_simplex, n_states, n_actions, delta, {});
}

PolicySpace PolicySpace::convex_hull(int n_states, int n_actions, std::vector<Actions> vertices) {
    if (vertices.empty()) throw InvalidArgument("convex_hull: vertex list is empty");
    for (const Actions& v : vertices) {
        if (static_cast<int>(v.size()) != n_states)
            throw DimensionError("convex_hull: vertex has wrong length");
        for (int a : v)
            if (a < 0 || a >= n_actions) throw InvalidArgument("convex_hull: action out of range");
    }
    return PolicySpace(Kind::convex_hull, n_states, n_actions, 0.0, std::move(vertices));
}

std::string PolicySpace::name() const {
    switch (kind_) {
        case Kind::full_simplex: return "full_simplex";
        case Kind::capped_simplex: return "capped_simplex";
        case Kind::convex_hull: return "convex_hull";
    }
    return "unknown";
}

std::size_t PolicySpace::extreme_point_count(std::size_t cap) const {
    if (kind_ == Kind::convex_hull) return std::min(vertices_.size(), cap + 1);
    return deterministic_policy_count(n_states_, n_actions_, cap);
}

StochasticPolicy PolicySpace::product_vertex(const Actions& actions) const {
    if (static_cast<int>(actions.size()) != n_states_)
        throw DimensionError("product_vertex: wrong length");
    if (kind_ == Kind::capped_simplex) {
        Matrix probs = Matrix::Constant(n_states_, n_actions_, delta_);
        const double top = 1.0 - delta_ * (n_actions_ - 1);
        for (int s = 0; s < n_states_; ++s) probs(s, actions[s]) = top;
        return StochasticPolicy(std::move(probs));
    }
    return StochasticPolicy::deterministic(actions, n_actions_);
}

StochasticPolicy PolicySpace::extreme_point(std::uint64_t k) const {
    if (kind_ == Kind::convex_hull)
        return StochasticPolicy::deterministic(vertices_.at(k), n_actions_);
    return product_vertex(decode_policy(k, n_states_, n_actions_));
}

StochasticPolicy PolicySpace::hull_point(const Vector& weights) const {
    if (kind_ != Kind::convex_hull) throw InvalidArgument("hull_point: not a convex hull");
    if (weights.size() != static_cast<Eigen::Index>(vertices_.size()))
        throw DimensionError("hull_point: weight count differs from vertex count");
    Matrix probs = Matrix::Zero(n_states_, n_actions_);
    for (std::size_t k = 0; k < vertices_.size(); ++k)
        for (int s = 0; s < n_states_; ++s) probs(s, vertices_[k][s]) += weights(k);
    return StochasticPolicy(std::move(probs));
}

StochasticPolicy PolicySpace::default_policy() const {
    if (kind_ == Kind::convex_hull) {
        const auto k = static_cast<Eigen::Index>(vertices_.size());
        return hull_point(Vector::Constant(k, 1.0 / static_cast<double>(k)));
    }
    return StochasticPolicy::uniform(n_states_, n_actions_);
}

Vector dirichlet_one(std::mt19937_64& rng, int length) {
    std::exponential_distribution<double> draw(1.0);
    Vector x(length);
    for (int i = 0; i < length; ++i) x(i) = draw(rng);
    return x / x.sum();
}

StochasticPolicy PolicySpace::sample(std::mt19937_64& rng) const {
    if (kind_ == Kind::convex_hull)
        return hull_point(dirichlet_one(rng, static_cast<int>(vertices_.size())));
    Matrix probs(n_states_, n_actions_);
    const double free_mass = 1.0 - delta_ * n_actions_;
    for (int s = 0; s < n_states_; ++s) {
        const Vector row = dirichlet_one(rng, n_actions_);
        for (int a = 0; a < n_actions_; ++a) probs(s, a) = delta_ + free_mass * row(a);
    }
    return StochasticPolicy(std::move(probs));
}

void require_shape(const PolicySpace& space, const Mdp& mdp) {
    if (space.n_states() != mdp.n_states() || space.n_actions() != mdp.n_actions())
        throw DimensionError("policy space shape does not match the MDP");
}

StochasticPolicy mix(const StochasticPolicy& pi, const StochasticPolicy& pi_prime, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("mix: alpha must lie in [0, 1]");
    if (pi.n_states() != pi_prime.n_states() || pi.n_actions() != pi_prime.n_actions())
        throw DimensionError("mix: policy shapes differ");
    if (alpha == 0.0) return pi;
    if (alpha == 1.0) return pi_prime;
    return StochasticPolicy((1.0 - alpha) * pi.probs() + alpha * pi_prime.probs());
}

bool contains(const PolicySpace& space, const StochasticPolicy& pi, double tolerance) {
    if (pi.n_states() != space.n_states() || pi.n_actions() != space.n_actions())
        throw DimensionError("contains: policy shape does not match the space");
    switch (space.kind()) {
        case PolicySpace::Kind::full_simplex: return true;
        case PolicySpace::Kind::capped_simplex:
            return pi.probs().minCoeff() >= space.delta() - tolerance;
        case PolicySpace::Kind::convex_hull: break;
    }
    return hull_weights(space, pi, tolerance).has_value();
}

std::optional<Vector> hull_weights(const PolicySpace& space, const StochasticPolicy& pi,
                                   double tolerance) {
    if (space.kind() != PolicySpace::Kind::convex_hull)
        throw InvalidArgument("hull_weights: not a convex hull");
    if (pi.n_states() != space.n_states() || pi.n_actions() != space.n_actions())
        throw DimensionError("hull_weights: policy shape does not match the space");
    const auto& vertices = space.vertices();
    const int S = space.n_states();
    const int A = space.n_actions();
    for (std::size_t k = 0; k < vertices.size(); ++k)
        if (pi == StochasticPolicy::deterministic(vertices[k], A)) {
            Vector w = Vector::Zero(static_cast<Eigen::Index>(vertices.size()));
            w(static_cast<Eigen::Index>(k)) = 1.0;
            return w;
        }

    // Shared vertex weights lambda: sum_k [v_k(s) == a] lambda_k = pi(a|s), sum lambda = 1.
    const auto K = static_cast<Eigen::Index>(vertices.size());
    Matrix a_eq = Matrix::Zero(static_cast<Eigen::Index>(S) * A + 1, K);
    Vector b(a_eq.rows());
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) b(static_cast<Eigen::Index>(s) * A + a) = pi(s, a);
    for (Eigen::Index k = 0; k < K; ++k) {
        for (int s = 0; s < S; ++s) a_eq(static_cast<Eigen::Index>(s) * A + vertices[k][s], k) = 1.0;
        a_eq(a_eq.rows() - 1, k) = 1.0;
    }
    b(b.size() - 1) = 1.0;
    detail::PhaseOne lp = detail::phase_one(a_eq, b);
    if (!(lp.residual <= tolerance)) return std::nullopt;
    return Vector(lp.x / lp.x.sum());
}

double linear_objective(const Matrix& weights, const StochasticPolicy& pi) {
    return weights.cwiseProduct(pi.probs()).sum();
}

StochasticPolicy linear_maximizer(const PolicySpace& space, const Matrix& weights) {
    if (weights.rows() != space.n_states() || weights.cols() != space.n_actions())
        throw DimensionError("linear_maximizer: weight table shape mismatch");
    if (!weights.allFinite()) throw InvalidArgument("linear_maximizer: non-finite weights");
    if (space.kind() != PolicySpace::Kind::convex_hull) {
        Actions best(space.n_states());
        for (int s = 0; s < space.n_states(); ++s) best[s] = argmax_lowest(weights.row(s));
        return space.product_vertex(best);
    }
    const auto& vertices = space.vertices();
    RowVector scores(static_cast<Eigen::Index>(vertices.size()));
    for (std::size_t k = 0; k < vertices.size(); ++k) {
        double value = 0.0;
        for (int s = 0; s < space.n_states(); ++s) value += weights(s, vertices[k][s]);
        scores(static_cast<Eigen::Index>(k)) = value;
    }
    return StochasticPolicy::deterministic(vertices[argmax_lowest(scores)], space.n_actions());
}

double greedy_shortfall(const PolicySpace& space, const Mdp& mdp, const OccupancyWeights& nu,
                        const StochasticPolicy& pi) {
    const ValueFn v = evaluate(mdp, pi);
    const OccupancyWeights d = occupancy(mdp, nu, pi);
    const Matrix q = q_values(mdp, v);
    const Matrix weights = d.weights().transpose().asDiagonal() * q;
    const double greedy = d.weights().dot(q.rowwise().maxCoeff());
    return greedy - linear_objective(weights, linear_maximizer(space, weights));
}

namespace {

bool single_point(const PolicySpace& space) {
    switch (space.kind()) {
        case PolicySpace::Kind::full_simplex: return space.n_actions() == 1;
        case PolicySpace::Kind::capped_simplex:
            return space.n_actions() == 1 ||
                   std::abs(space.delta() * space.n_actions() - 1.0) <= tol::structural;
        case PolicySpace::Kind::convex_hull: return space.vertices().size() == 1;
    }
    return false;
}

// Hill climbing on the shortfall; moves replace one state's row by an extreme
// row (or half-way towards it) for product spaces, or mix towards one vertex
// with steps 1, 1/2, 1/4 for hulls.
struct Climber {
    const PolicySpace& space;
    const Mdp& mdp;
    const OccupancyWeights& nu;
    int max_sweeps;

    std::vector<StochasticPolicy> moves(const StochasticPolicy& pi) const {
        std::vector<StochasticPolicy> out;
        if (space.kind() == PolicySpace::Kind::convex_hull) {
            for (std::size_t k = 0; k < space.vertices().size(); ++k) {
                const StochasticPolicy target = space.extreme_point(k);
                for (double step : {1.0, 0.5, 0.25}) out.push_back(mix(pi, target, step));
            }
            return out;
        }
        const double top = 1.0 - space.delta() * (space.n_actions() - 1);
        for (int s = 0; s < space.n_states(); ++s)
            for (int a = 0; a < space.n_actions(); ++a) {
                RowVector vertex_row = RowVector::Constant(space.n_actions(), space.delta());
                vertex_row(a) = top;
                for (double step : {1.0, 0.5}) {
                    Matrix probs = pi.probs();
                    probs.row(s) = (1.0 - step) * probs.row(s) + step * vertex_row;
                    out.emplace_back(std::move(probs));
                }
            }
        return out;
    }

    std::pair<StochasticPolicy, double> climb(StochasticPolicy pi) const {
        double value = greedy_shortfall(space, mdp, nu, pi);
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            double best_value = value;
            std::optional<StochasticPolicy> best;
            for (StochasticPolicy& candidate : moves(pi)) {
                const double candidate_value = greedy_shortfall(space, mdp, nu, candidate);
                if (candidate_value > best_value + tol::ascent) {
                    best_value = candidate_value;
                    best = std::move(candidate);
                }
            }
            if (!best) break;
            pi = std::move(*best);
            value = best_value;
        }
        return {std::move(pi), value};
    }
};

}  // namespace

GreedyComplexityEstimate greedy_complexity(const PolicySpace& space, const Mdp& mdp,
                                           const OccupancyWeights& nu,
                                           const ComplexityOptions& options) {
    require_shape(space, mdp);
    require_shape(mdp, nu);
    if (!nu.is_distribution()) throw InvalidArgument("greedy_complexity: nu must be a distribution");

    GreedyComplexityEstimate out{0.0, space.default_policy(), options.restarts, 0, false,
                                 "vertex-scan+dirichlet-restarts+coordinate-ascent"};
    double best = -std::numeric_limits<double>::infinity();
    auto consider = [&](const StochasticPolicy& pi, double value) {
        if (value > best) {
            best = value;
            out.candidate_argmax_policy = pi;
        }
    };

    if (single_point(space)) {
        const StochasticPolicy only = space.default_policy();
        out.lower_bound = std::max(0.0, greedy_shortfall(space, mdp, nu, only));
        out.candidate_argmax_policy = only;
        out.exact = true;
        out.n_restarts = 0;
        out.method = "single-point";
        return out;
    }

    const std::size_t count = space.extreme_point_count(options.enumeration_cap);
    if (count <= options.enumeration_cap) {
        for (std::uint64_t k = 0; k < count; ++k) {
            const StochasticPolicy vertex = space.extreme_point(k);
            consider(vertex, greedy_shortfall(space, mdp, nu, vertex));
        }
        out.n_vertices_scanned = static_cast<int>(count);
    }

    std::mt19937_64 rng(options.seed);
    const Climber climber{space, mdp, nu, options.max_sweeps};
    for (int r = 0; r < options.restarts; ++r) {
        auto [pi, value] = climber.climb(space.sample(rng));
        consider(pi, value);
    }
    out.lower_bound = std::max(0.0, best);
    return out;
}

GreedyComplexityEstimate dpi_greedy_complexity(const PolicySpace& space, const Mdp& mdp,
                                               const OccupancyWeights& nu,
                                               const ComplexityOptions& options) {
    if (space.kind() != PolicySpace::Kind::convex_hull)
        throw InvalidArgument("dpi_greedy_complexity: requires a convex hull of deterministic policies");
    require_shape(space, mdp);
    require_shape(mdp, nu);
    if (!nu.is_distribution())
        throw InvalidArgument("dpi_greedy_complexity: nu must be a distribution");

    const auto& vertices = space.vertices();
    std::vector<std::size_t> rows;
    const bool exhaustive = vertices.size() <= options.enumeration_cap;
    if (exhaustive) {
        rows.resize(vertices.size());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
    } else {
        std::mt19937_64 rng(options.seed);
        std::uniform_int_distribution<std::size_t> pick(0, vertices.size() - 1);
        for (int r = 0; r < std::max(1, options.restarts); ++r) rows.push_back(pick(rng));
    }
    const std::vector<double> gaps =
        kernels::vertex_gaps(mdp, nu.weights(), vertices, rows, kernels::Backend::openmp);
    std::size_t arg = 0;
    for (std::size_t r = 1; r < gaps.size(); ++r)
        if (gaps[r] > gaps[arg]) arg = r;

    GreedyComplexityEstimate out{std::max(0.0, gaps[arg]),
                                 StochasticPolicy::deterministic(vertices[rows[arg]], mdp.n_actions()),
                                 exhaustive ? 0 : static_cast<int>(rows.size()),
                                 static_cast<int>(rows.size()), exhaustive,
                                 exhaustive ? "vertex-enumeration" : "sampled-vertices"};
    return out;
}

}  // namespace boundlab
