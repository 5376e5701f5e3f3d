#include "boundlab/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "boundlab/errors.hpp"
#include "boundlab/io.hpp"
#include "boundlab/reference.hpp"
#include "harness_internal.hpp"

namespace boundlab::harness {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum Tag : std::uint64_t { kPolicies = 1, kSpace, kInit, kPairs, kSampler };

CheckRecord make_record(const Instance& inst, std::string check, BoundReport report, bool pass,
                        bool gating) {
    return {inst.index, inst.seed, std::move(check), std::move(report), pass, gating};
}

// lhs = measured value, pass iff value <= threshold.
CheckRecord at_most(const Instance& inst, std::string check, double value, double threshold,
                    json params = json::object(), bool gating = true) {
    BoundReport r;
    r.theorem = check;
    r.lhs = value;
    r.rhs = Bracket::point(threshold);
    r.slack = threshold - value;
    r.params = std::move(params);
    const bool pass = value <= threshold;
    return make_record(inst, std::move(check), std::move(r), pass, gating);
}

// lhs = threshold, rhs = measured value, pass iff value >= threshold.
CheckRecord at_least(const Instance& inst, std::string check, double value, double threshold,
                     json params = json::object(), bool gating = true) {
    BoundReport r;
    r.theorem = check;
    r.lhs = threshold;
    r.rhs = Bracket::point(value);
    r.slack = value - threshold;
    r.params = std::move(params);
    const bool pass = value >= threshold;
    return make_record(inst, std::move(check), std::move(r), pass, gating);
}

CheckRecord bound(const Instance& inst, std::string check, BoundReport report) {
    const bool pass = report.holds();
    const bool gating = report.certified;
    return make_record(inst, std::move(check), std::move(report), pass, gating);
}

const SpaceSpec& space_for(const Instance& inst, const ExperimentConfig& config) {
    return config.spaces[static_cast<std::size_t>(inst.index) % config.spaces.size()];
}

PolicySpace make_space(const Instance& inst, const ExperimentConfig& config) {
    return resolve(space_for(inst, config), inst.mdp, derive_seed(inst.seed, kSpace));
}

LpsResult run_lps(const Instance& inst, const ExperimentConfig& config, const OccupancyWeights& nu,
                  const PolicySpace& space, double eps) {
    LpsOptions o;
    o.eps = eps;
    o.max_iters = config.max_iters;
    o.init_seed = derive_seed(inst.seed, kInit);
    return local_search(inst.mdp, nu, space, o);
}

StochasticPolicy random_policy(std::mt19937_64& rng, int S, int A) {
    return PolicySpace::full_simplex(S, A).sample(rng);
}

Actions random_actions(std::mt19937_64& rng, int S, int A) {
    std::uniform_int_distribution<int> pick(0, A - 1);
    Actions a(S);
    for (int& x : a) x = pick(rng);
    return a;
}

json lps_params(const LpsResult& r) {
    return {{"fw_gap", r.fw_gap}, {"iterations", r.iterations},
            {"termination", to_string(r.termination)}};
}

using Records = std::vector<CheckRecord>;

// ---------------------------------------------------------------- suites

Records suite_lemma1(const Instance& inst, const ExperimentConfig& config) {
    const Mdp& mdp = inst.mdp;
    std::mt19937_64 rng(derive_seed(inst.seed, kPolicies));
    double worst = 0.0;
    for (int k = 0; k < config.pairs; ++k) {
        const StochasticPolicy pi = random_policy(rng, mdp.n_states(), mdp.n_actions());
        const StochasticPolicy pi_prime = random_policy(rng, mdp.n_states(), mdp.n_actions());
        worst = std::max(worst, value_difference_identity_residual(mdp, pi, pi_prime));
    }
    return {at_most(inst, "lemma1_residual", worst, 1e-9,
                    {{"pairs", config.pairs}, {"gamma", mdp.discount()}})};
}

Records suite_theorem1(const Instance& inst, const ExperimentConfig& config) {
    const Mdp& mdp = inst.mdp;
    const int S = mdp.n_states();
    const int A = mdp.n_actions();
    std::mt19937_64 rng(derive_seed(inst.seed, kPolicies));
    double worst_rel = 0.0;
    double worst_exponent = kInf;
    int vanishing = 0;
    for (int k = 0; k < config.pairs; ++k) {
        const StochasticPolicy pi = random_policy(rng, S, A);
        const StochasticPolicy pi_prime = random_policy(rng, S, A);
        const OccupancyWeights nu(dirichlet_one(rng, S).transpose());
        const double analytic = directional_derivative(mdp, pi, pi_prime, nu);
        const double fd =
            reference::central_difference(mdp, nu.weights(), pi.probs(), pi_prime.probs(), 1e-6);
        worst_rel = std::max(worst_rel, std::abs(fd - analytic) / std::max(std::abs(analytic), 1e-6));

        const double j0 = reference::objective(mdp, nu.weights(), pi.probs());
        std::vector<double> alphas{1e-2, 1e-3, 1e-4};
        std::vector<double> remainders;
        for (double a : alphas)
            remainders.push_back(
                reference::mixture_objective(mdp, nu.weights(), pi.probs(), pi_prime.probs(), a) - j0 -
                a * analytic);
        // An affine objective along the segment leaves only roundoff; the
        // O(alpha^2) bound then holds with constant zero.
        double largest = 0.0;
        for (double r : remainders) largest = std::max(largest, std::abs(r));
        if (largest <= 1e-12 * (1.0 + std::abs(j0))) {
            ++vanishing;
            continue;
        }
        worst_exponent = std::min(worst_exponent, reference::fitted_exponent(alphas, remainders));
    }
    return {at_most(inst, "theorem1_derivative_relative_error", worst_rel, 1e-4,
                    {{"alpha", 1e-6}, {"pairs", config.pairs}}),
            at_least(inst, "theorem1_remainder_exponent", worst_exponent, 1.9,
                     {{"alphas", {1e-2, 1e-3, 1e-4}},
                      {"gamma", mdp.discount()},
                      {"vanishing_remainders", vanishing}})};
}

Records suite_theorem1_equivalence(const Instance& inst, const ExperimentConfig& config) {
    const Mdp& mdp = inst.mdp;
    const OccupancyWeights nu = resolve(config.nu, mdp);
    const PolicySpace space = make_space(inst, config);
    const LpsResult lps = run_lps(inst, config, nu, space, config.eps);
    const OccupancyWeights d = occupancy(mdp, nu, lps.policy);
    const double slack = relaxed_greedy_slack(mdp, lps.policy, d, space);
    const double gamma = mdp.discount();
    Records out;
    json p = lps_params(lps);
    p["relaxed_slack"] = slack;
    p["space"] = space.name();
    out.push_back(at_most(inst, "theorem1_slack_equals_scaled_gap",
                          std::abs(slack - (1.0 - gamma) * lps.fw_gap), 1e-12, p));

    // The certificate is the largest directional derivative over the space.
    double worst = -kInf;
    std::size_t n_extreme = space.extreme_point_count();
    const bool enumerate = space.kind() != PolicySpace::Kind::convex_hull
                               ? n_extreme <= default_enumeration_cap
                               : true;
    if (space.kind() == PolicySpace::Kind::convex_hull) n_extreme = space.vertices().size();
    if (enumerate) {
        for (std::uint64_t k = 0; k < n_extreme; ++k)
            worst = std::max(worst, directional_derivative(mdp, lps.policy, space.extreme_point(k), nu));
    }
    std::mt19937_64 rng(derive_seed(inst.seed, kPairs));
    for (int k = 0; k < config.pairs; ++k)
        worst = std::max(worst, directional_derivative(mdp, lps.policy, space.sample(rng), nu));
    out.push_back(at_most(inst, "theorem1_certificate_is_maximal", worst, lps.fw_gap + 1e-10,
                          {{"extreme_points_enumerated", enumerate}, {"fw_gap", lps.fw_gap}}));
    return out;
}

Records suite_theorem2(const Instance& inst, const ExperimentConfig& config) {
    const Mdp& mdp = inst.mdp;
    const OccupancyWeights mu = resolve(config.mu, mdp);
    const OccupancyWeights nu = resolve(config.nu, mdp);
    const PolicySpace space = make_space(inst, config);
    const LpsResult lps = run_lps(inst, config, nu, space, config.eps);
    const OccupancyWeights d = occupancy(mdp, nu, lps.policy);
    const double eps = std::max(0.0, relaxed_greedy_slack(mdp, lps.policy, d, space));
    const double d_gap = instance_gap(mdp, lps.policy, nu, space).d_gap;
    Records out;
    out.push_back(bound(inst, "theorem2_optimal",
                        theorem2_rhs(mdp, lps.policy, optimal_solve(mdp).policy, mu, nu, d_gap, eps)));
    std::mt19937_64 rng(derive_seed(inst.seed, kPairs));
    for (int k = 0; k < config.pairs; ++k) {
        const StochasticPolicy pi_prime = random_policy(rng, mdp.n_states(), mdp.n_actions());
        out.push_back(bound(inst, "theorem2_random_reference",
                            theorem2_rhs(mdp, lps.policy, pi_prime, mu, nu, d_gap, eps)));
    }
    return out;
}

Records suite_theorem3(const Instance& inst, const ExperimentConfig& config) {
    const Mdp& mdp = inst.mdp;
    const OccupancyWeights mu = resolve(config.mu, mdp);
    const OccupancyWeights nu = resolve(config.nu, mdp);
    const PolicySpace space = make_space(inst, config);
    const LpsResult lps = run_lps(inst, config, nu, space, config.eps);
    Records out;
    BoundReport r = theorem3_report(mdp, lps, mu, nu, space);
    const bool pass = r.holds() && r.lhs >= -1e-9;
    out.push_back(make_record(inst, "theorem3", std::move(r), pass, true));
    std::mt19937_64 rng(derive_seed(inst.seed, kPairs));
    const StochasticPolicy pi_prime = random_policy(rng, mdp.n_states(), mdp.n_actions());
    out.push_back(bound(inst, "general_pi_prime", general_pi_prime_report(mdp, lps, pi_prime, mu, nu, space)));
    out.push_back(at_most(inst, "theorem3_certified_gap", lps.fw_gap, config.eps, lps_params(lps)));
    return out;
}

Records suite_theorem5(const Instance& inst, const ExperimentConfig& config) {
    const Mdp& mdp = inst.mdp;
    const OccupancyWeights mu = resolve(config.mu, mdp);
    const OccupancyWeights nu = resolve(config.nu, mdp);
    const PolicySpace space = PolicySpace::full_simplex(mdp.n_states(), mdp.n_actions());
    const LpsResult lps = run_lps(inst, config, nu, space, config.eps);
    const double loss = mu.dot(optimal_solve(mdp).value - evaluate(mdp, lps.policy));
    Records out;
    json p = lps_params(lps);
    p["nu_positive"] = nu.strictly_positive();
    out.push_back(at_most(inst, "theorem5_final_loss", loss, 1e-6, p, nu.strictly_positive()));
    out.push_back(bound(inst, "theorem5_bound", theorem3_report(mdp, lps, mu, nu, space)));
    return out;
}

Records suite_theorem4(const Instance& inst, const ExperimentConfig& config) {
    const Mdp& mdp = inst.mdp;
    const OccupancyWeights mu = resolve(config.mu, mdp);
    const OccupancyWeights nu = resolve(config.nu, mdp);
    ConcentrationOptions co;
    co.seed = derive_seed(inst.seed, kSampler);
    return {bound(inst, "theorem4", theorem4_inequality_check(mdp, mu, nu, config.i_max, config.j_max, co))};
}

// Smallest one-step concentration over the grid {nu : nu(s) in resolution * N}.
double grid_minimum(const Mdp& mdp, const OccupancyWeights& mu, double resolution,
                    std::size_t* points) {
    const int S = mdp.n_states();
    const int units = static_cast<int>(std::lround(1.0 / resolution));
    std::vector<int> parts(S, 0);
    double best = kInf;
    std::size_t count = 0;
    std::function<void(int, int)> rec = [&](int s, int left) {
        if (s == S - 1) {
            parts[s] = left;
            RowVector w(S);
            for (int t = 0; t < S; ++t) w(t) = static_cast<double>(parts[t]) / units;
            best = std::min(best, one_step_concentration(mdp, mu, OccupancyWeights(w)));
            ++count;
            return;
        }
        for (int k = 0; k <= left; ++k) {
            parts[s] = k;
            rec(s + 1, left - k);
        }
    };
    rec(0, units);
    if (points) *points = count;
    return best;
}

Records suite_counterexample(const Instance& inst, const ExperimentConfig& config) {
    const int n = inst.counterexample_n;
    const Counterexample ce = theorem4_counterexample(n, inst.mdp.discount());
    const Mdp& mdp = ce.mdp;
    const OccupancyWeights uniform = OccupancyWeights::uniform(n);
    Records out;
    const double c = one_step_concentration(mdp, ce.mu, uniform);
    json p = {{"n", n}, {"value", c}};
    out.push_back(at_most(inst, "counterexample_uniform_exact", std::abs(c - n), 1e-9 * n, p));

    // Attained by the policy sending every state to state 0.
    const Matrix p0 = transition_under(mdp, StochasticPolicy::deterministic(Actions(n, 0), n));
    const double attained = density_ratio_norm(RowVector(ce.mu.weights() * p0), uniform.weights());
    out.push_back(at_least(inst, "counterexample_attained", attained, static_cast<double>(n) - 1e-9,
                           {{"n", n}}));
    if (deterministic_policy_count(n, n, default_enumeration_cap) <= default_enumeration_cap) {
        std::vector<Actions> all;
        for (std::uint64_t k = 0; k < deterministic_policy_count(n, n, default_enumeration_cap); ++k)
            all.push_back(decode_policy(k, n, n));
        const Matrix rows = ce.mu.weights();
        const double enumerated =
            kernels::serial::stationary_terms(mdp, rows, uniform.weights(), all, 1)(0, 1);
        out.push_back(at_most(inst, "counterexample_enumeration_agrees", std::abs(enumerated - c),
                              1e-9 * n, {{"enumerated", enumerated}}));
    }

    if (n <= config.grid_max_states) {
        std::size_t points = 0;
        const double best = grid_minimum(mdp, ce.mu, config.grid_resolution, &points);
        out.push_back(at_least(inst, "counterexample_grid_minimum", best, n - 1e-6,
                               {{"resolution", config.grid_resolution}, {"points", points}}));
    }
    std::mt19937_64 rng(derive_seed(inst.seed, kPairs));
    double best = kInf;
    for (int k = 0; k < config.pairs; ++k)
        best = std::min(best, one_step_concentration(mdp, ce.mu,
                                                     OccupancyWeights(dirichlet_one(rng, n).transpose())));
    out.push_back(at_least(inst, "counterexample_random_minimum", best, n - 1e-6, {{"samples", config.pairs}}));
    return out;
}

Records suite_dpi(const Instance& inst, const ExperimentConfig& config) {
    const Mdp& mdp = inst.mdp;
    const OccupancyWeights mu = resolve(config.mu, mdp);
    const OccupancyWeights nu = resolve(config.nu, mdp);
    const PolicySpace space = make_space(inst, config);
    Records out;
    if (space.kind() == PolicySpace::Kind::convex_hull) {
        const DeterministicPolicySet set =
            DeterministicPolicySet::listed(mdp.n_states(), mdp.n_actions(), space.vertices());
        const DpiResult dpi = run_dpi(mdp, nu, mu, set, space.vertices().front(), config.max_iters);
        ConcentrationOptions co;
        co.seed = derive_seed(inst.seed, kSampler);
        out.push_back(bound(inst, "dpi_restricted_bound",
                            dpi_bound_report(mdp, dpi, mu, nu, set, config.i_max, config.j_max, co)));
        return out;
    }
    std::mt19937_64 rng(derive_seed(inst.seed, kInit));
    const Actions init = random_actions(rng, mdp.n_states(), mdp.n_actions());
    const DeterministicPolicySet set = DeterministicPolicySet::all(mdp.n_states(), mdp.n_actions());
    const DpiResult dpi = run_dpi(mdp, nu, mu, set, init, config.max_iters);
    const PolicyIterationTrace pi = policy_iteration(mdp, init);
    const bool same = dpi.policy_sequence == pi.trajectory;
    BoundReport r;
    r.theorem = "dpi_matches_policy_iteration";
    r.lhs = same ? 0.0 : 1.0;
    r.rhs = Bracket::point(0.0);
    r.slack = -r.lhs;
    r.params = {{"dpi_steps", dpi.policy_sequence.size()}, {"pi_steps", pi.trajectory.size()},
                {"nu_positive", nu.strictly_positive()}};
    out.push_back(make_record(inst, "dpi_matches_policy_iteration", std::move(r), same,
                              nu.strictly_positive()));
    out.push_back(at_most(inst, "dpi_full_limsup_loss", dpi.limsup_loss, 1e-9, {}, nu.strictly_positive()));
    return out;
}

Records suite_eprime(const Instance& inst, const ExperimentConfig& config) {
    const Mdp& mdp = inst.mdp;
    const OccupancyWeights nu = resolve(config.nu, mdp);
    const PolicySpace space = make_space(inst, config);
    const double gamma = mdp.discount();
    std::mt19937_64 rng(derive_seed(inst.seed, kPairs));
    double worst_pair = -kInf;
    double worst_instance = -kInf;
    for (int k = 0; k < config.pairs; ++k) {
        const StochasticPolicy pi = space.sample(rng);
        const StochasticPolicy pi_prime = space.sample(rng);
        const ValueFn v = evaluate(mdp, pi);
        const Vector shortfall = q_values(mdp, v).rowwise().maxCoeff() - bellman(mdp, pi_prime, v);
        const double nu_gap = nu.dot(shortfall);
        const double d_gap = occupancy(mdp, nu, pi).dot(shortfall);
        worst_pair = std::max(worst_pair, nu_gap - d_gap / (1.0 - gamma));
        const InstanceGap g = instance_gap(mdp, pi, nu, space);
        worst_instance = std::max(worst_instance, g.nu_gap - g.d_gap / (1.0 - gamma));
    }
    Records out;
    out.push_back(at_most(inst, "eprime_pair_relation", worst_pair, 1e-9, {{"pairs", config.pairs}}));
    out.push_back(at_most(inst, "eprime_instance_gap_relation", worst_instance, 1e-9));
    if (space.kind() == PolicySpace::Kind::convex_hull) {
        ComplexityOptions co;
        co.seed = derive_seed(inst.seed, kSampler);
        co.restarts = config.restarts;
        const GreedyComplexityEstimate e_prime = dpi_greedy_complexity(space, mdp, nu, co);
        const GreedyComplexityEstimate e = greedy_complexity(space, mdp, nu, co);
        // Certified only when the estimate of E covered every vertex.
        const bool covered =
            e_prime.exact && e.n_vertices_scanned >= static_cast<int>(space.vertices().size());
        out.push_back(at_most(inst, "eprime_le_e_over_one_minus_gamma",
                              e_prime.lower_bound - e.lower_bound / (1.0 - gamma), 1e-9,
                              {{"e_prime", e_prime.lower_bound},
                               {"e_lower_bound", e.lower_bound},
                               {"e_method", e.method}},
                              covered));
    }
    return out;
}

Records suite_nu_relaxed(const Instance& inst, const ExperimentConfig& config) {
    const Mdp& mdp = inst.mdp;
    const OccupancyWeights mu = resolve(config.mu, mdp);
    const OccupancyWeights nu = resolve(config.nu, mdp);
    const PolicySpace space = make_space(inst, config);
    const LpsResult lps = run_lps(inst, config, nu, space, config.eps);
    const double measured = std::max(0.0, relaxed_greedy_slack(mdp, lps.policy, nu, space));
    Records out;
    out.push_back(bound(inst, "nu_relaxed_lps_output",
                        nu_relaxed_report(mdp, lps.policy, mu, nu, space, measured)));
    std::mt19937_64 rng(derive_seed(inst.seed, kPairs));
    const StochasticPolicy pi_prime = random_policy(rng, mdp.n_states(), mdp.n_actions());
    out.push_back(bound(inst, "nu_relaxed_random_reference",
                        nu_relaxed_report(mdp, lps.policy, mu, nu, space, measured, pi_prime)));
    bool rejected = false;
    double reported = 0.0;
    if (measured > 1e-6) {
        try {
            nu_relaxed_report(mdp, lps.policy, mu, nu, space, measured / 2.0);
        } catch (const PreconditionError& e) {
            rejected = true;
            reported = e.measured();
        }
        BoundReport r;
        r.theorem = "nu_relaxed_precondition_enforced";
        r.lhs = rejected ? 0.0 : 1.0;
        r.slack = -r.lhs;
        r.params = {{"measured", measured}, {"reported", reported}};
        out.push_back(make_record(inst, r.theorem, r, rejected, true));
    }
    return out;
}

Records suite_reweighting(const Instance& inst, const ExperimentConfig& config, std::string* table) {
    const Mdp& mdp = inst.mdp;
    const OccupancyWeights mu = resolve(config.mu, mdp);
    const OccupancyWeights nu = resolve(config.nu, mdp);
    const PolicySpace space = make_space(inst, config);
    const auto rounds = reweighting_iteration(mdp, mu, nu, space, config.eps, config.rounds, config.max_iters);
    std::ostringstream csv;
    double worst_increase = 0.0;
    for (std::size_t k = 0; k < rounds.size(); ++k) {
        csv << inst.index << ',' << inst.seed << ',' << k + 1 << ',' << io::format_real(rounds[k].loss)
            << ',' << io::format_real(rounds[k].fw_gap) << '\n';
        if (k > 0) worst_increase = std::max(worst_increase, rounds[k].loss - rounds[k - 1].loss);
    }
    if (table) *table = csv.str();
    return {at_most(inst, "reweighting_monotone", worst_increase, 1e-9,
                    {{"rounds", config.rounds},
                     {"first_loss", rounds.front().loss},
                     {"last_loss", rounds.back().loss},
                     {"space", space.name()}},
                    false)};
}

DeterministicPolicySet generating_set(const PolicySpace& space) {
    if (space.kind() == PolicySpace::Kind::convex_hull)
        return DeterministicPolicySet::listed(space.n_states(), space.n_actions(), space.vertices());
    return DeterministicPolicySet::all(space.n_states(), space.n_actions());
}

Records compare_instance(const Instance& inst, const ExperimentConfig& config, std::string* row) {
    const Mdp& mdp = inst.mdp;
    const OccupancyWeights mu = resolve(config.mu, mdp);
    const OccupancyWeights nu = resolve(config.nu, mdp);
    const PolicySpace space = make_space(inst, config);
    Table1Options o;
    o.i_max = config.i_max;
    o.j_max = config.j_max;
    o.seed = derive_seed(inst.seed, kSampler);
    o.max_iters = config.max_iters;
    const Table1Report t = table1_report(mdp, mu, nu, space, generating_set(space), config.eps, o);
    std::ostringstream csv;
    io::write_table1_rows(csv, inst.label, t);
    if (row) *row = csv.str();
    Records out;
    BoundReport c;
    c.theorem = "table1_concentration_inequality";
    c.lhs = t.lps.concentration_term.upper;
    c.rhs = {t.dpi.concentration_term.lower / (1.0 - mdp.discount()),
             t.dpi.concentration_term.upper / (1.0 - mdp.discount())};
    c.slack = std::isinf(c.rhs.upper) ? kInf : c.rhs.upper - c.lhs;
    out.push_back(make_record(inst, c.theorem, c, t.concentration_inequality_holds, true));
    for (const Table1Row* r : {&t.lps, &t.dpi}) {
        BoundReport g;
        g.theorem = "table1_" + r->method + "_guarantee";
        g.lhs = r->measured_loss;
        g.rhs = r->guarantee;
        g.slack = std::isinf(r->guarantee.upper) ? kInf : r->guarantee.upper - r->measured_loss;
        g.params = {{"error_term", r->error_term}};
        const bool gating = r->method == "LPS" || t.error_terms_exact;
        out.push_back(make_record(inst, g.theorem, g, g.holds(), gating));
    }
    return out;
}

using InstanceSuite = std::function<Records(const Instance&, const ExperimentConfig&, std::string*)>;

struct SuiteEntry {
    std::string name;
    InstanceSuite run;
    bool own_instances = false;  ///< counterexample builds its own family
};

template <typename F>
InstanceSuite plain(F f) {
    return [f](const Instance& i, const ExperimentConfig& c, std::string*) { return f(i, c); };
}

const std::vector<SuiteEntry>& registry() {
    static const std::vector<SuiteEntry> entries = {
        {"lemma1", plain(suite_lemma1)},
        {"theorem1", plain(suite_theorem1)},
        {"theorem1-equivalence", plain(suite_theorem1_equivalence)},
        {"theorem2", plain(suite_theorem2)},
        {"theorem3", plain(suite_theorem3)},
        {"theorem4", plain(suite_theorem4)},
        {"theorem5", plain(suite_theorem5)},
        {"counterexample", plain(suite_counterexample), true},
        {"dpi", plain(suite_dpi)},
        {"eprime", plain(suite_eprime)},
        {"nu-relaxed", plain(suite_nu_relaxed)},
        {"reweighting", suite_reweighting},
        {"compare", compare_instance},
    };
    return entries;
}

const char* table_header(const std::string& suite) {
    if (suite == "reweighting") return "instance,seed,round,loss,fw_gap\n";
    return nullptr;
}

// Runs f over instances in a work pool; results come back in instance order.
std::vector<std::pair<Records, std::string>> run_pool(const std::vector<Instance>& instances,
                                                       const ExperimentConfig& config,
                                                       const InstanceSuite& f) {
    const int n = static_cast<int>(instances.size());
    std::vector<std::pair<Records, std::string>> results(n);
    std::vector<std::string> errors(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(pool_threads())
    for (int k = 0; k < n; ++k) {
        try {
            results[k].first = f(instances[k], config, &results[k].second);
        } catch (const std::exception& e) {
            errors[k] = e.what();
        }
    }
    for (int k = 0; k < n; ++k)
        if (!errors[k].empty())
            throw SolverError(instances[k].label + ": " + errors[k]);
    return results;
}

SuiteResult run_entry(const SuiteEntry& entry, const ExperimentConfig& config,
                      const std::vector<Instance>& shared) {
    std::vector<Instance> own;
    if (entry.own_instances && config.instances.kind != "counterexample") {
        ExperimentConfig c = config;
        c.instances.kind = "counterexample";
        own = build_instances(c);
    }
    const std::vector<Instance>& instances = entry.own_instances && !own.empty() ? own : shared;
    SuiteResult out;
    out.suite = entry.name;
    auto results = run_pool(instances, config, entry.run);
    std::string table;
    for (auto& [records, extra] : results) {
        for (auto& r : records) out.records.push_back(std::move(r));
        table += extra;
    }
    if (entry.name == "compare") {
        std::ostringstream h;
        io::write_table1_header(h);
        out.tables.push_back(h.str() + table);
    } else if (const char* header = table_header(entry.name)) {
        out.tables.push_back(header + table);
    }
    std::stable_sort(out.records.begin(), out.records.end(),
                     [](const CheckRecord& a, const CheckRecord& b) { return a.instance < b.instance; });
    return out;
}

}  // namespace

int default_threads() { return omp_get_max_threads(); }

bool SuiteResult::passed() const { return failures() == 0; }

int SuiteResult::failures() const {
    return static_cast<int>(std::count_if(records.begin(), records.end(),
                                          [](const CheckRecord& r) { return r.gating && !r.pass; }));
}

double SuiteResult::max_lhs(const std::string& check) const {
    double out = -kInf;
    for (const auto& r : records)
        if (r.check == check) out = std::max(out, r.report.lhs);
    return out;
}

double SuiteResult::min_slack(const std::string& check) const {
    double out = kInf;
    for (const auto& r : records)
        if (r.check == check) out = std::min(out, r.report.slack);
    return out;
}

std::size_t SuiteResult::count(const std::string& check) const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [&](const CheckRecord& r) { return r.check == check; }));
}

bool SuiteResult::all_pass(const std::string& check) const {
    return count(check) > 0 && std::all_of(records.begin(), records.end(), [&](const CheckRecord& r) {
               return r.check != check || r.pass;
           });
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& e : registry()) n.push_back(e.name);
        n.push_back("all");
        return n;
    }();
    return names;
}

SuiteResult run_suite(const std::string& suite, const ExperimentConfig& config) {
    const std::vector<Instance> instances =
        suite == "counterexample" ? std::vector<Instance>{} : build_instances(config);
    if (suite == "all") {
        SuiteResult out;
        out.suite = "all";
        for (const auto& entry : registry()) {
            SuiteResult part = run_entry(entry, config, instances);
            for (auto& r : part.records) {
                r.check = entry.name + "/" + r.check;
                out.records.push_back(std::move(r));
            }
            for (auto& t : part.tables) out.tables.push_back(std::move(t));
        }
        return out;
    }
    for (const auto& entry : registry()) {
        if (entry.name != suite) continue;
        if (entry.own_instances && config.instances.kind == "counterexample")
            return run_entry(entry, config, build_instances(config));
        return run_entry(entry, config, instances);
    }
    throw InvalidArgument("unknown suite '" + suite + "'");
}

json records_to_json(const SuiteResult& result) {
    json arr = json::array();
    for (const auto& r : result.records) {
        json j = io::to_json(r.report);
        j["suite"] = result.suite;
        j["check"] = r.check;
        j["instance"] = r.instance;
        j["seed"] = r.seed;
        j["pass"] = r.pass;
        j["gating"] = r.gating;
        arr.push_back(std::move(j));
    }
    return {{"suite", result.suite}, {"failures", result.failures()}, {"reports", std::move(arr)}};
}

std::string summary_csv(const SuiteResult& result) {
    std::ostringstream out;
    out << "suite,instance,seed,check,lhs,rhs_lower,rhs_upper,slack,certified,gating,pass\n";
    for (const auto& r : result.records)
        out << result.suite << ',' << r.instance << ',' << r.seed << ',' << r.check << ','
            << io::format_real(r.report.lhs) << ',' << io::format_real(r.report.rhs.lower) << ','
            << io::format_real(r.report.rhs.upper) << ',' << io::format_real(r.report.slack) << ','
            << (r.report.certified ? 1 : 0) << ',' << (r.gating ? 1 : 0) << ',' << (r.pass ? 1 : 0)
            << '\n';
    return out.str();
}

void write_suite(const SuiteResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    io::write_json(dir / "reports.json", records_to_json(result));
    std::ofstream(dir / "summary.csv") << summary_csv(result);
    for (std::size_t k = 0; k < result.tables.size(); ++k) {
        const std::string name = result.tables.size() == 1 ? "table.csv" : "table" + std::to_string(k) + ".csv";
        std::ofstream(dir / name) << result.tables[k];
    }
}

std::vector<ReweightRound> reweighting_iteration(const Mdp& mdp, const OccupancyWeights& mu,
                                                 const OccupancyWeights& nu0,
                                                 const PolicySpace& space, double eps, int rounds,
                                                 int max_iters) {
    if (rounds < 1) throw InvalidArgument("reweighting_iteration: rounds must be at least 1");
    const ValueFn v_star = optimal_solve(mdp).value;
    std::vector<ReweightRound> out;
    std::optional<StochasticPolicy> previous;
    for (int i = 0; i < rounds; ++i) {
        const OccupancyWeights weights = previous ? occupancy(mdp, nu0, *previous) : nu0;
        LpsOptions o;
        o.eps = eps;
        o.max_iters = max_iters;
        o.init = previous;
        LpsResult r = local_search(mdp, weights, space, o);
        const double loss = mu.dot(v_star - evaluate(mdp, r.policy));
        previous = r.policy;
        out.push_back({std::move(r.policy), weights, loss, r.fw_gap});
    }
    return out;
}

std::string compare_lps_dpi(const ExperimentConfig& config, SuiteResult* checks) {
    SuiteResult r = run_suite("compare", config);
    std::string table = r.tables.empty() ? std::string() : r.tables.front();
    if (checks) *checks = std::move(r);
    return table;
}

}  // namespace boundlab::harness
