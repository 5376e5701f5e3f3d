#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "boundlab/dpi.hpp"
#include "boundlab/kernels.hpp"
#include "boundlab/lps.hpp"

namespace boundlab {

/// JSON value of a real, with non-finite values spelled "inf", "-inf" or "nan".
inline nlohmann::json json_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

/// Inverse of json_real.
double real_from_json(const nlohmann::json& j);

/// Certified enclosure [lower, upper]; upper may be +infinity.
struct Bracket {
    double lower = 0.0;
    double upper = 0.0;

    static Bracket point(double x) { return {x, x}; }
    double width() const { return upper - lower; }
};

/**
 * Left and right sides of one inequality evaluated on one instance.
 *
 * slack is rhs.upper - lhs: the check passes iff slack >= -1e-8. A report is
 * certified when every quantity on the right side is exact or a certified
 * upper bound, so a negative slack would contradict the inequality.
 */
struct BoundReport {
    std::string theorem;
    double lhs = 0.0;
    Bracket rhs;
    double slack = 0.0;
    bool certified = true;
    nlohmann::json params = nlohmann::json::object();

    bool holds(double tolerance = 1e-8) const { return slack >= -tolerance; }
};

/// max_{pi'' in space} w T_{pi''} v_pi - w T_pi v_pi.
double relaxed_greedy_slack(const Mdp& mdp, const StochasticPolicy& pi,
                            const OccupancyWeights& weight, const PolicySpace& space);

struct InstanceGap {
    double d_gap;   ///< d_{nu,pi} T v_pi - max_{pi'} d_{nu,pi} T_{pi'} v_pi
    double nu_gap;  ///< nu T v_pi - max_{pi'} nu T_{pi'} v_pi
};

InstanceGap instance_gap(const Mdp& mdp, const StochasticPolicy& pi, const OccupancyWeights& nu,
                         const PolicySpace& space);

/// mu v_{pi'} <= mu v_pi + |d_{mu,pi'}/nu| (d_gap + eps) / (1-gamma)^2,
/// valid whenever eps >= relaxed_greedy_slack(pi, d_{nu,pi}).
BoundReport theorem2_rhs(const Mdp& mdp, const StochasticPolicy& pi,
                         const StochasticPolicy& pi_prime, const OccupancyWeights& mu,
                         const OccupancyWeights& nu, double d_gap, double eps);

/// 0 <= mu(v_* - v_pi) <= |d_{mu,pi_*}/nu| / (1-gamma) (d_gap / (1-gamma) + eps)
/// with eps the certified Frank-Wolfe gap of the local search output.
BoundReport theorem3_report(const Mdp& mdp, const LpsResult& lps_result,
                            const OccupancyWeights& mu, const OccupancyWeights& nu,
                            const PolicySpace& space);

/// Same guarantee against an arbitrary reference policy pi'.
BoundReport general_pi_prime_report(const Mdp& mdp, const LpsResult& lps_result,
                                    const StochasticPolicy& pi_prime, const OccupancyWeights& mu,
                                    const OccupancyWeights& nu, const PolicySpace& space);

/// For pi nu-relaxed greedy within eps:
/// mu v_{pi'} <= mu v_pi + |d_{mu,pi'}/nu| (nu_gap + eps) / (1-gamma).
/// pi' defaults to an optimal policy. Throws PreconditionError carrying the
/// measured slack when the membership does not hold.
BoundReport nu_relaxed_report(const Mdp& mdp, const StochasticPolicy& pi,
                              const OccupancyWeights& mu, const OccupancyWeights& nu,
                              const PolicySpace& space, double eps,
                              const std::optional<StochasticPolicy>& pi_prime = std::nullopt);

struct ConcentrationOptions {
    std::size_t enumeration_cap = default_enumeration_cap;
    int samples = 512;  ///< stationary policies sampled above the cap
    std::uint64_t seed = 0;
    kernels::Backend backend = kernels::Backend::openmp;
};

struct ConcentrationBracket {
    Bracket value;             ///< encloses C*_{mu,nu}
    Matrix lower_terms;        ///< (i_max+1) x (j_max+1) stationary lower bounds
    Matrix upper_terms;        ///< nonstationary upper bounds
    double tail = 0.0;         ///< upper-bound contribution of the truncated terms
    bool stationary_enumerated = false;
    int policies_scanned = 0;
};

/// Certified bracket of (1-gamma)^2 sum_{i,j} gamma^{i+j} sup_pi |mu P_*^i P_pi^j / nu|_inf.
ConcentrationBracket concentrability_star(const Mdp& mdp, const OccupancyWeights& mu,
                                          const OccupancyWeights& nu, const Actions& pi_star,
                                          int i_max, int j_max,
                                          const ConcentrationOptions& options = {});

/// sup_pi |mu P_pi / nu|_inf, exact (one step decouples across states).
double one_step_concentration(const Mdp& mdp, const OccupancyWeights& mu,
                              const OccupancyWeights& nu);

struct Counterexample {
    Mdp mdp;
    OccupancyWeights mu;
};

/// n states, n actions, action a moves to state a deterministically from every
/// state, zero rewards, mu a point mass on state 0.
Counterexample theorem4_counterexample(int n, double discount = 0.9);

/// |d_{mu,pi_*}/nu|_inf <= C*_{mu,nu} / (1-gamma), checked against the upper end.
BoundReport theorem4_inequality_check(const Mdp& mdp, const OccupancyWeights& mu,
                                      const OccupancyWeights& nu, int i_max, int j_max,
                                      const ConcentrationOptions& options = {});

/// limsup mu(v_* - v_{pi_k}) <= C*_{mu,nu} / (1-gamma)^2 (E'_nu(P) + 0), with the
/// estimation error pinned to zero by the exact DPI step.
BoundReport dpi_bound_report(const Mdp& mdp, const DpiResult& dpi, const OccupancyWeights& mu,
                             const OccupancyWeights& nu, const DeterministicPolicySet& vertex_set,
                             int i_max, int j_max, const ConcentrationOptions& options = {});

struct Table1Row {
    std::string method;  ///< "LPS" or "DPI"
    std::string bounded_term;
    double horizon_term;
    Bracket concentration_term;
    double error_term;
    Bracket guarantee;  ///< horizon * concentration * error
    double measured_loss;
};

struct Table1Report {
    Table1Row lps;
    Table1Row dpi;
    bool error_terms_exact;             ///< E' enumerated
    bool concentration_inequality_holds;  ///< LPS column <= DPI column upper / (1-gamma)
    double lps_fw_gap;
    int lps_iterations;
    int dpi_steps;
};

struct Table1Options {
    int i_max = 40;
    int j_max = 40;
    std::uint64_t seed = 0;
    int max_iters = 10000;
    ConcentrationOptions concentration;
};

Table1Report table1_report(const Mdp& mdp, const OccupancyWeights& mu, const OccupancyWeights& nu,
                           const PolicySpace& space, const DeterministicPolicySet& vertex_set,
                           double eps, const Table1Options& options = {});

}  // namespace boundlab
