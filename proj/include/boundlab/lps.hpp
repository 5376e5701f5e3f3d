#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "boundlab/policy_space.hpp"

namespace boundlab {

/// lim_{alpha->0} (J_nu(mix(pi, pi', alpha)) - J_nu(pi)) / alpha
///   = nu (I - gamma P_pi)^{-1} (T_{pi'} v_pi - v_pi)
///   = d_{nu,pi} (T_{pi'} v_pi - v_pi) / (1 - gamma).
double directional_derivative(const Mdp& mdp, const StochasticPolicy& pi,
                              const StochasticPolicy& pi_prime, const OccupancyWeights& nu);

/// Frank-Wolfe direction and gap. The gap is the largest directional
/// derivative over the whole space, so gap <= eps certifies an eps-local optimum.
struct Certificate {
    StochasticPolicy direction;
    double gap;
};

Certificate fw_certificate(const Mdp& mdp, const StochasticPolicy& pi, const OccupancyWeights& nu,
                           const PolicySpace& space);

struct LineSearchResult {
    double alpha;
    double value;  ///< J_nu at the accepted step
};

/// Exact line search of alpha -> J_nu(mix(pi, direction, alpha)) on [0, 1]:
/// 17-point scan, then bisection on the sign of the slope in the scan cell
/// beside the best point, and alpha = 0 unless the objective does not decrease.
LineSearchResult line_search(const Mdp& mdp, const StochasticPolicy& pi,
                             const StochasticPolicy& direction, const OccupancyWeights& nu);

enum class Termination { gap_reached, max_iters, stalled };

std::string to_string(Termination t);

struct TracePoint {
    int iter;
    double objective;
    double gap;
    double alpha;  ///< step taken after this certificate (0 on the last row)
};

struct LpsResult {
    StochasticPolicy policy;
    double fw_gap;
    int iterations;
    std::vector<TracePoint> objective_trace;
    Termination termination;
};

struct LpsOptions {
    double eps = 1e-8;
    int max_iters = 10000;
    std::optional<StochasticPolicy> init;    ///< must lie in the space
    std::optional<std::uint64_t> init_seed;  ///< random start drawn from the space
};

/// Conditional-gradient ascent of J_nu over the space until the certified
/// gap is at most eps.
LpsResult local_search(const Mdp& mdp, const OccupancyWeights& nu, const PolicySpace& space,
                       const LpsOptions& options = {});

/// J_nu(pi) = nu . v_pi
double objective(const Mdp& mdp, const OccupancyWeights& nu, const StochasticPolicy& pi);

}  // namespace boundlab
