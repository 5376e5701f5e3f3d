#include "boundlab/bounds.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "boundlab/errors.hpp"

namespace boundlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// coefficient * term with an infinite coefficient kept infinite even when the
// term vanishes (the bound is vacuous, not zero).
double scaled(double coefficient, double term) {
    if (std::isinf(coefficient)) return kInf;
    return coefficient * term;
}

BoundReport make_report(std::string theorem, double lhs, Bracket rhs, bool certified) {
    BoundReport r;
    r.theorem = std::move(theorem);
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = std::isinf(rhs.upper) ? kInf : rhs.upper - lhs;
    r.certified = certified;
    return r;
}

Matrix start_rows(const Mdp& mdp, const OccupancyWeights& mu, const Actions& pi_star, int i_max) {
    const Matrix p_star = kernels::detail::deterministic_kernel(mdp, pi_star);
    Matrix rows(i_max + 1, mdp.n_states());
    RowVector x = mu.weights();
    for (int i = 0; i <= i_max; ++i) {
        rows.row(i) = x;
        x = x * p_star;
    }
    return rows;
}

}  // namespace

double real_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        throw InvalidArgument("expected a number, got string '" + s + "'");
    }
    return j.get<double>();
}

double relaxed_greedy_slack(const Mdp& mdp, const StochasticPolicy& pi,
                            const OccupancyWeights& weight, const PolicySpace& space) {
    require_shape(space, mdp);
    require_shape(mdp, weight);
    if (!contains(space, pi)) throw InvalidArgument("relaxed_greedy_slack: policy lies outside the space");
    const ValueFn v = evaluate(mdp, pi);
    const Matrix q = q_values(mdp, v);
    const Matrix weights = weight.weights().transpose().asDiagonal() * q;
    const double best = linear_objective(weights, linear_maximizer(space, weights));
    return best - weight.dot(bellman(mdp, pi, v));
}

InstanceGap instance_gap(const Mdp& mdp, const StochasticPolicy& pi, const OccupancyWeights& nu,
                         const PolicySpace& space) {
    require_shape(space, mdp);
    const ValueFn v = evaluate(mdp, pi);
    const Matrix q = q_values(mdp, v);
    const Vector tv = q.rowwise().maxCoeff();
    auto gap_under = [&](const OccupancyWeights& w) {
        const Matrix weights = w.weights().transpose().asDiagonal() * q;
        return w.dot(tv) - linear_objective(weights, linear_maximizer(space, weights));
    };
    return {gap_under(occupancy(mdp, nu, pi)), gap_under(nu)};
}

BoundReport theorem2_rhs(const Mdp& mdp, const StochasticPolicy& pi,
                         const StochasticPolicy& pi_prime, const OccupancyWeights& mu,
                         const OccupancyWeights& nu, double d_gap, double eps) {
    const double gamma = mdp.discount();
    const double value_pi = mu.dot(evaluate(mdp, pi));
    const double lhs = mu.dot(evaluate(mdp, pi_prime));
    const double coefficient = density_ratio_norm(occupancy(mdp, mu, pi_prime), nu);
    const double rhs = value_pi + scaled(coefficient, (d_gap + eps) / ((1.0 - gamma) * (1.0 - gamma)));
    BoundReport r = make_report("theorem2", lhs, Bracket::point(rhs), true);
    r.params = {{"gamma", gamma},
                {"mu_v_pi", value_pi},
                {"concentration", json_real(coefficient)},
                {"d_gap", d_gap},
                {"eps", eps},
                {"infinite_coefficient", std::isinf(coefficient)}};
    return r;
}

namespace {

BoundReport lps_guarantee(std::string theorem, const Mdp& mdp, const LpsResult& lps,
                          const StochasticPolicy& reference, const OccupancyWeights& mu,
                          const OccupancyWeights& nu, const PolicySpace& space) {
    const double gamma = mdp.discount();
    const double value_pi = mu.dot(evaluate(mdp, lps.policy));
    const double value_ref = mu.dot(evaluate(mdp, reference));
    const double coefficient = density_ratio_norm(occupancy(mdp, mu, reference), nu);
    const InstanceGap gap = instance_gap(mdp, lps.policy, nu, space);
    const double eps = lps.fw_gap;
    // The Frank-Wolfe gap eps certifies a d-weighted greedy slack of (1-gamma) eps.
    const double rhs_term = scaled(coefficient, (gap.d_gap / (1.0 - gamma) + eps) / (1.0 - gamma));

    BoundReport r;
    r.theorem = std::move(theorem);
    r.certified = true;
    r.params = {{"gamma", gamma},
                {"concentration", json_real(coefficient)},
                {"d_gap", gap.d_gap},
                {"nu_gap", gap.nu_gap},
                {"eps", eps},
                {"space", space.name()},
                {"lps_iterations", lps.iterations},
                {"termination", to_string(lps.termination)}};
    r.lhs = value_ref - value_pi;
    r.rhs = Bracket::point(rhs_term);
    r.slack = std::isinf(rhs_term) ? kInf : rhs_term - r.lhs;
    return r;
}

}  // namespace

BoundReport theorem3_report(const Mdp& mdp, const LpsResult& lps_result,
                            const OccupancyWeights& mu, const OccupancyWeights& nu,
                            const PolicySpace& space) {
    const OptimalSolution opt = optimal_solve(mdp);
    BoundReport r = lps_guarantee("theorem3", mdp, lps_result, opt.policy, mu, nu, space);
    r.params["lhs_nonnegative"] = r.lhs >= -tol::numerical;
    return r;
}

BoundReport general_pi_prime_report(const Mdp& mdp, const LpsResult& lps_result,
                                    const StochasticPolicy& pi_prime, const OccupancyWeights& mu,
                                    const OccupancyWeights& nu, const PolicySpace& space) {
    return lps_guarantee("general_pi_prime", mdp, lps_result, pi_prime, mu, nu, space);
}

BoundReport nu_relaxed_report(const Mdp& mdp, const StochasticPolicy& pi,
                              const OccupancyWeights& mu, const OccupancyWeights& nu,
                              const PolicySpace& space, double eps,
                              const std::optional<StochasticPolicy>& pi_prime) {
    const double measured = relaxed_greedy_slack(mdp, pi, nu, space);
    if (measured > eps + tol::structural)
        throw PreconditionError("nu_relaxed_report: policy is not nu-relaxed greedy within eps",
                                measured);
    const double gamma = mdp.discount();
    const StochasticPolicy reference = pi_prime ? *pi_prime : optimal_solve(mdp).policy;
    const double value_pi = mu.dot(evaluate(mdp, pi));
    const double value_ref = mu.dot(evaluate(mdp, reference));
    const double coefficient = density_ratio_norm(occupancy(mdp, mu, reference), nu);
    const InstanceGap gap = instance_gap(mdp, pi, nu, space);
    const double rhs_term = scaled(coefficient, (gap.nu_gap + eps) / (1.0 - gamma));
    BoundReport r = make_report("nu_relaxed", value_ref - value_pi, Bracket::point(rhs_term), true);
    r.params = {{"gamma", gamma},
                {"concentration", json_real(coefficient)},
                {"nu_gap", gap.nu_gap},
                {"eps", eps},
                {"measured_nu_slack", measured},
                {"space", space.name()}};
    return r;
}

ConcentrationBracket concentrability_star(const Mdp& mdp, const OccupancyWeights& mu,
                                          const OccupancyWeights& nu, const Actions& pi_star,
                                          int i_max, int j_max,
                                          const ConcentrationOptions& options) {
    require_shape(mdp, mu);
    require_shape(mdp, nu);
    if (i_max < 0 || j_max < 0) throw InvalidArgument("concentrability_star: negative horizon");
    const int S = mdp.n_states();
    const int A = mdp.n_actions();
    const double gamma = mdp.discount();

    const Matrix rows = start_rows(mdp, mu, pi_star, i_max);

    ConcentrationBracket out;
    std::vector<Actions> policies;
    const std::size_t count = deterministic_policy_count(S, A, options.enumeration_cap);
    if (count <= options.enumeration_cap) {
        out.stationary_enumerated = true;
        for (std::uint64_t k = 0; k < count; ++k) policies.push_back(decode_policy(k, S, A));
    } else {
        std::mt19937_64 rng(options.seed);
        std::uniform_int_distribution<int> pick(0, A - 1);
        policies.push_back(pi_star);
        for (int k = 0; k < options.samples; ++k) {
            Actions a(S);
            for (int& x : a) x = pick(rng);
            policies.push_back(std::move(a));
        }
    }
    out.policies_scanned = static_cast<int>(policies.size());

    out.lower_terms =
        kernels::stationary_terms(mdp, rows, nu.weights(), policies, j_max, options.backend);
    out.upper_terms = kernels::nonstationary_terms(mdp, rows, nu.weights(), j_max, options.backend);
    // Zero or one step of an arbitrary policy decouples across states, so the
    // backward pass is exact there.
    for (int j = 0; j <= std::min(j_max, 1); ++j) out.lower_terms.col(j) = out.upper_terms.col(j);

    double lower = 0.0;
    double upper = 0.0;
    double gamma_i = 1.0;
    for (int i = 0; i <= i_max; ++i) {
        double gamma_ij = gamma_i;
        for (int j = 0; j <= j_max; ++j) {
            lower += gamma_ij * out.lower_terms(i, j);
            upper += gamma_ij * out.upper_terms(i, j);
            gamma_ij *= gamma;
        }
        gamma_i *= gamma;
    }
    const double scale = (1.0 - gamma) * (1.0 - gamma);
    lower *= scale;
    upper *= scale;

    // Terms outside the box have ratio at most 1 / min nu; their weights sum to
    // 1 - (1 - gamma^{I+1})(1 - gamma^{J+1}) after scaling.
    const double tail_weight =
        1.0 - (1.0 - std::pow(gamma, i_max + 1)) * (1.0 - std::pow(gamma, j_max + 1));
    if (tail_weight > 0.0) {
        const double min_nu = nu.weights().minCoeff();
        out.tail = min_nu > 0.0 ? tail_weight / min_nu : kInf;
        upper += out.tail;
    }
    out.value = {lower, upper};
    return out;
}

double one_step_concentration(const Mdp& mdp, const OccupancyWeights& mu,
                              const OccupancyWeights& nu) {
    require_shape(mdp, mu);
    require_shape(mdp, nu);
    const Matrix rows = mu.weights();
    return kernels::serial::nonstationary_terms(mdp, rows, nu.weights(), 1)(0, 1);
}

Counterexample theorem4_counterexample(int n, double discount) {
    if (n < 2) throw InvalidArgument("theorem4_counterexample: n must be at least 2");
    RowMatrix kernel = RowMatrix::Zero(static_cast<Eigen::Index>(n) * n, n);
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < n; ++a) kernel(static_cast<Eigen::Index>(s) * n + a, a) = 1.0;
    Mdp mdp(n, n, discount, std::move(kernel), Matrix::Zero(n, n));
    return {std::move(mdp), OccupancyWeights::point(n, 0)};
}

BoundReport theorem4_inequality_check(const Mdp& mdp, const OccupancyWeights& mu,
                                      const OccupancyWeights& nu, int i_max, int j_max,
                                      const ConcentrationOptions& options) {
    const double gamma = mdp.discount();
    const OptimalSolution opt = optimal_solve(mdp);
    const double lhs = density_ratio_norm(occupancy(mdp, mu, opt.policy), nu);
    const ConcentrationBracket c = concentrability_star(mdp, mu, nu, opt.actions, i_max, j_max, options);
    BoundReport r = make_report("theorem4", lhs,
                                {c.value.lower / (1.0 - gamma), c.value.upper / (1.0 - gamma)}, true);
    if (std::isinf(lhs)) r.slack = std::isinf(r.rhs.upper) ? 0.0 : -kInf;
    r.params = {{"gamma", gamma},
                {"i_max", i_max},
                {"j_max", j_max},
                {"cstar_lower", json_real(c.value.lower)},
                {"cstar_upper", json_real(c.value.upper)},
                {"bracket_width", json_real(c.value.width())},
                {"tail", json_real(c.tail)},
                {"stationary_enumerated", c.stationary_enumerated},
                {"policies_scanned", c.policies_scanned}};
    return r;
}

BoundReport dpi_bound_report(const Mdp& mdp, const DpiResult& dpi, const OccupancyWeights& mu,
                             const OccupancyWeights& nu, const DeterministicPolicySet& vertex_set,
                             int i_max, int j_max, const ConcentrationOptions& options) {
    const double gamma = mdp.discount();
    const OptimalSolution opt = optimal_solve(mdp);
    double e_prime = 0.0;
    bool exact = true;
    if (!vertex_set.is_full()) {
        ComplexityOptions co;
        co.seed = options.seed;
        const GreedyComplexityEstimate est =
            dpi_greedy_complexity(vertex_set.hull(), mdp, nu, co);
        e_prime = est.lower_bound;
        exact = est.exact;
    }
    const ConcentrationBracket c = concentrability_star(mdp, mu, nu, opt.actions, i_max, j_max, options);
    const double horizon = 1.0 / ((1.0 - gamma) * (1.0 - gamma));
    const Bracket rhs{scaled(c.value.lower, horizon * e_prime), scaled(c.value.upper, horizon * e_prime)};
    // With E' = 0 the right side is zero whenever C* is finite.
    Bracket fixed = rhs;
    if (e_prime == 0.0) {
        fixed.lower = 0.0;
        fixed.upper = std::isinf(c.value.upper) ? kInf : 0.0;
    }
    BoundReport r = make_report("dpi", dpi.limsup_loss, fixed, exact);
    r.params = {{"gamma", gamma},
                {"e_prime", e_prime},
                {"e_prime_exact", exact},
                {"estimation_error", 0.0},
                {"cstar_lower", json_real(c.value.lower)},
                {"cstar_upper", json_real(c.value.upper)},
                {"cycle_detected", dpi.cycle_detected},
                {"steps", static_cast<int>(dpi.policy_sequence.size()) - 1}};
    return r;
}

Table1Report table1_report(const Mdp& mdp, const OccupancyWeights& mu, const OccupancyWeights& nu,
                           const PolicySpace& space, const DeterministicPolicySet& vertex_set,
                           double eps, const Table1Options& options) {
    const double gamma = mdp.discount();
    const double horizon = 1.0 / ((1.0 - gamma) * (1.0 - gamma));
    const OptimalSolution opt = optimal_solve(mdp);

    LpsOptions lo;
    lo.eps = eps;
    lo.max_iters = options.max_iters;
    const LpsResult lps = local_search(mdp, nu, space, lo);
    const double lps_loss = mu.dot(opt.value - evaluate(mdp, lps.policy));
    const double c_lps = density_ratio_norm(occupancy(mdp, mu, opt.policy), nu);
    const InstanceGap gap = instance_gap(mdp, lps.policy, nu, space);
    const double lps_error = gap.d_gap + lps.fw_gap * (1.0 - gamma);

    const Actions init =
        vertex_set.is_full() ? Actions(mdp.n_states(), 0) : vertex_set.members().front();
    const DpiResult dpi = run_dpi(mdp, nu, mu, vertex_set, init, options.max_iters);
    double e_prime = 0.0;
    bool exact = true;
    if (!vertex_set.is_full()) {
        ComplexityOptions co;
        co.seed = options.seed;
        const GreedyComplexityEstimate est = dpi_greedy_complexity(vertex_set.hull(), mdp, nu, co);
        e_prime = est.lower_bound;
        exact = est.exact;
    }
    ConcentrationOptions copt = options.concentration;
    copt.seed = options.seed;
    const ConcentrationBracket c =
        concentrability_star(mdp, mu, nu, opt.actions, options.i_max, options.j_max, copt);

    Table1Report out{
        {"LPS", "mu(v_* - v_pi)", horizon, Bracket::point(c_lps), lps_error,
         Bracket::point(scaled(c_lps, horizon * lps_error)), lps_loss},
        {"DPI", "limsup mu(v_* - v_pi_k)", horizon, c.value, e_prime,
         {scaled(c.value.lower, horizon * e_prime), scaled(c.value.upper, horizon * e_prime)},
         dpi.limsup_loss},
        exact,
        c_lps <= c.value.upper / (1.0 - gamma) + tol::numerical,
        lps.fw_gap,
        lps.iterations,
        static_cast<int>(dpi.policy_sequence.size()) - 1};
    if (e_prime == 0.0 && std::isfinite(c.value.upper)) out.dpi.guarantee = {0.0, 0.0};
    if (lps_error == 0.0 && std::isfinite(c_lps)) out.lps.guarantee = {0.0, 0.0};
    return out;
}

}  // namespace boundlab
