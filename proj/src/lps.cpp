#include "boundlab/lps.hpp"

#include <cmath>
#include <random>

#include "boundlab/errors.hpp"

namespace boundlab {

namespace {

struct Linearization {
    ValueFn value;
    OccupancyWeights occupancy;
};

Linearization linearize(const Mdp& mdp, const StochasticPolicy& pi, const OccupancyWeights& nu) {
    return {evaluate(mdp, pi), occupancy(mdp, nu, pi)};
}

double derivative_at(const Mdp& mdp, const Linearization& lin, const StochasticPolicy& pi_prime) {
    const Vector advantage = bellman(mdp, pi_prime, lin.value) - lin.value;
    // nu (I - gamma P_pi)^{-1} = d_{nu,pi} / (1 - gamma)
    return lin.occupancy.dot(advantage) / (1.0 - mdp.discount());
}

Certificate certificate_unchecked(const Mdp& mdp, const StochasticPolicy& pi,
                                  const OccupancyWeights& nu, const PolicySpace& space) {
    const Linearization lin = linearize(mdp, pi, nu);
    const Matrix q = q_values(mdp, lin.value);
    const Matrix weights = lin.occupancy.weights().transpose().asDiagonal() * q;
    StochasticPolicy direction = linear_maximizer(space, weights);
    const double gap = derivative_at(mdp, lin, direction);
    return {std::move(direction), gap};
}

StochasticPolicy renormalized(const StochasticPolicy& pi) {
    Matrix probs = pi.probs();
    for (Eigen::Index s = 0; s < probs.rows(); ++s) probs.row(s) /= probs.row(s).sum();
    return StochasticPolicy(std::move(probs));
}

// Pairwise Frank-Wolfe on a hull: shift the mass of the worst active vertex
// onto the best vertex, which avoids the zig-zag of plain steps when the
// optimum sits inside a face. The certificate is still the plain gap.
LpsResult pairwise_search(const Mdp& mdp, const OccupancyWeights& nu, const PolicySpace& space,
                          Vector weights, const LpsOptions& options) {
    const auto& vertices = space.vertices();
    const auto K = static_cast<Eigen::Index>(vertices.size());
    StochasticPolicy pi = space.hull_point(weights);
    LpsResult out{pi, 0.0, 0, {}, Termination::max_iters};
    double value = objective(mdp, nu, pi);
    for (int iter = 0;; ++iter) {
        const Linearization lin = linearize(mdp, pi, nu);
        const Matrix q = q_values(mdp, lin.value);
        const Matrix table = lin.occupancy.weights().transpose().asDiagonal() * q;
        const double base = lin.occupancy.dot(lin.value);
        RowVector scores(K);
        for (Eigen::Index k = 0; k < K; ++k) {
            double score = 0.0;
            for (int s = 0; s < space.n_states(); ++s) score += table(s, vertices[k][s]);
            scores(k) = (score - base) / (1.0 - mdp.discount());
        }
        const Eigen::Index best = argmax_lowest(scores);
        out.objective_trace.push_back({iter, value, scores(best), 0.0});
        out.fw_gap = scores(best);
        if (out.fw_gap <= options.eps) {
            out.termination = Termination::gap_reached;
            break;
        }
        if (iter >= options.max_iters) {
            out.termination = Termination::max_iters;
            break;
        }
        Eigen::Index away = -1;
        for (Eigen::Index k = 0; k < K; ++k)
            if (weights(k) > 0.0 && k != best && (away < 0 || scores(k) < scores(away))) away = k;

        Vector target = Vector::Zero(K);
        target(best) = 1.0;
        if (away >= 0 && scores(best) - scores(away) > out.fw_gap) {
            target = weights;
            target(best) += target(away);
            target(away) = 0.0;
        }
        LineSearchResult step = line_search(mdp, pi, space.hull_point(target), nu);
        if (step.alpha <= 0.0 && target(best) != 1.0) {
            target = Vector::Zero(K);
            target(best) = 1.0;
            step = line_search(mdp, pi, space.hull_point(target), nu);
        }
        if (step.alpha <= 0.0) {
            out.termination = Termination::stalled;
            break;
        }
        out.objective_trace.back().alpha = step.alpha;
        weights = (1.0 - step.alpha) * weights + step.alpha * target;
        for (Eigen::Index k = 0; k < K; ++k)
            if (weights(k) < 1e-15) weights(k) = 0.0;
        weights /= weights.sum();
        pi = space.hull_point(weights);
        value = objective(mdp, nu, pi);
        ++out.iterations;
    }
    out.policy = std::move(pi);
    return out;
}

}  // namespace

double objective(const Mdp& mdp, const OccupancyWeights& nu, const StochasticPolicy& pi) {
    require_shape(mdp, nu);
    return nu.dot(evaluate(mdp, pi));
}

double directional_derivative(const Mdp& mdp, const StochasticPolicy& pi,
                              const StochasticPolicy& pi_prime, const OccupancyWeights& nu) {
    require_shape(mdp, pi_prime);
    return derivative_at(mdp, linearize(mdp, pi, nu), pi_prime);
}

Certificate fw_certificate(const Mdp& mdp, const StochasticPolicy& pi, const OccupancyWeights& nu,
                           const PolicySpace& space) {
    require_shape(space, mdp);
    require_shape(mdp, pi);
    if (!contains(space, pi)) throw InvalidArgument("fw_certificate: policy lies outside the space");
    return certificate_unchecked(mdp, pi, nu, space);
}

LineSearchResult line_search(const Mdp& mdp, const StochasticPolicy& pi,
                             const StochasticPolicy& direction, const OccupancyWeights& nu) {
    auto value_at = [&](double alpha) { return objective(mdp, nu, mix(pi, direction, alpha)); };

    const double current = value_at(0.0);
    constexpr int scan = 16;
    double best_alpha = 0.0;
    double best_value = current;
    int best_k = 0;
    for (int k = 1; k <= scan; ++k) {
        const double alpha = static_cast<double>(k) / scan;
        const double value = value_at(alpha);
        if (value > best_value) {
            best_value = value;
            best_alpha = alpha;
            best_k = k;
        }
    }

    // Bisection on the sign of the slope inside the scan cell next to the best
    // point. Near a stationary point the objective gains are below rounding,
    // while the slope is still resolved accurately.
    auto slope_at = [&](double alpha) {
        const StochasticPolicy at = mix(pi, direction, alpha);
        const Linearization lin = linearize(mdp, at, nu);
        return (derivative_at(mdp, lin, direction) - derivative_at(mdp, lin, pi));
    };
    const double h = 1.0 / scan;
    const double s_best = slope_at(best_alpha);
    double lo = best_alpha;
    double hi = best_alpha;
    if (s_best > 0.0 && best_k < scan) {
        hi = best_alpha + h;
    } else if (s_best < 0.0 && best_k > 0) {
        lo = best_alpha - h;
    }
    if (hi > lo && slope_at(lo) > 0.0 && slope_at(hi) < 0.0) {
        for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            (slope_at(mid) > 0.0 ? lo : hi) = mid;
        }
        const double refined = lo;
        const double refined_value = value_at(refined);
        const double tol = 1e-14 * (1.0 + std::abs(best_value));
        if (refined_value > best_value || (best_k == 0 && refined > 0.0 && refined_value >= current - tol)) {
            // Rounding-level tie with a positive slope at 0: the gain is real
            // but below the resolution of the objective.
            return {refined, refined_value};
        }
    }
    if (!(best_value >= current)) return {0.0, current};
    return {best_alpha, best_value};
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::gap_reached: return "gap_reached";
        case Termination::max_iters: return "max_iters";
        case Termination::stalled: return "stalled";
    }
    return "unknown";
}

LpsResult local_search(const Mdp& mdp, const OccupancyWeights& nu, const PolicySpace& space,
                       const LpsOptions& options) {
    require_shape(space, mdp);
    require_shape(mdp, nu);
    if (!(options.eps > 0.0)) throw InvalidArgument("local_search: eps must be positive");
    if (!nu.is_distribution()) throw InvalidArgument("local_search: nu must be a distribution");

    StochasticPolicy pi = space.default_policy();
    if (options.init) {
        pi = *options.init;
        require_shape(mdp, pi);
        if (!contains(space, pi)) throw InvalidArgument("local_search: init lies outside the space");
    } else if (options.init_seed) {
        std::mt19937_64 rng(*options.init_seed);
        pi = space.sample(rng);
    }

    if (space.kind() == PolicySpace::Kind::convex_hull) {
        Vector weights;
        if (options.init) {
            weights = *hull_weights(space, pi);
        } else if (options.init_seed) {
            std::mt19937_64 rng(*options.init_seed);
            weights = dirichlet_one(rng, static_cast<int>(space.vertices().size()));
        } else {
            const auto k = static_cast<Eigen::Index>(space.vertices().size());
            weights = Vector::Constant(k, 1.0 / static_cast<double>(k));
        }
        return pairwise_search(mdp, nu, space, std::move(weights), options);
    }

    LpsResult out{pi, 0.0, 0, {}, Termination::max_iters};
    double value = objective(mdp, nu, pi);
    for (int iter = 0;; ++iter) {
        Certificate cert = certificate_unchecked(mdp, pi, nu, space);
        out.objective_trace.push_back({iter, value, cert.gap, 0.0});
        out.fw_gap = cert.gap;
        if (cert.gap <= options.eps) {
            out.termination = Termination::gap_reached;
            break;
        }
        if (iter >= options.max_iters) {
            out.termination = Termination::max_iters;
            break;
        }
        const LineSearchResult step = line_search(mdp, pi, cert.direction, nu);
        if (step.alpha <= 0.0) {
            out.termination = Termination::stalled;
            break;
        }
        out.objective_trace.back().alpha = step.alpha;
        pi = renormalized(mix(pi, cert.direction, step.alpha));
        value = objective(mdp, nu, pi);
        ++out.iterations;
    }
    out.policy = std::move(pi);
    return out;
}

}  // namespace boundlab
