#pragma once

#include <cstddef>

namespace boundlab {

/// Library-wide tolerances.
namespace tol {

/// Probability rows, simplex sums, occupancy lower bound slack.
inline constexpr double structural = 1e-12;

/// Linear-solve residuals and value-level identities.
inline constexpr double numerical = 1e-9;

/// Relative margin under which two action scores count as tied; the lowest
/// index wins.
inline constexpr double tie = 1e-12;

/// Minimal improvement accepted by coordinate ascent.
inline constexpr double ascent = 1e-10;

}  // namespace tol

/// Above this many extreme points a space is sampled instead of enumerated.
inline constexpr std::size_t default_enumeration_cap = 4096;

}  // namespace boundlab
