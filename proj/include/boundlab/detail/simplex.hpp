#pragma once

#include "boundlab/mdp.hpp"

namespace boundlab::detail {

struct PhaseOne {
    double residual;  ///< minimal total artificial mass
    Vector x;         ///< basic solution attaining it
};

/// Phase-one simplex for { x >= 0 : A x = b }. Returns the minimal total
/// artificial mass (the L1 infeasibility); zero iff the system is feasible.
/// Dense tableau with Bland's rule, intended for desk-scale systems.
PhaseOne phase_one(const Matrix& a_eq, const Vector& b);

double phase_one_residual(const Matrix& a_eq, const Vector& b);

}  // namespace boundlab::detail
