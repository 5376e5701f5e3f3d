#include "boundlab/detail/simplex.hpp"

#include <limits>
#include <vector>

#include "boundlab/errors.hpp"

namespace boundlab::detail {

PhaseOne phase_one(const Matrix& a_eq, const Vector& b) {
    const Eigen::Index m = a_eq.rows();
    const Eigen::Index n = a_eq.cols();
    if (b.size() != m) throw DimensionError("phase_one: rhs size mismatch");
    if (m == 0) return {0.0, Vector::Zero(n)};

    // Columns: n structural, m artificial, 1 rhs. Last row holds reduced costs.
    const Eigen::Index width = n + m + 1;
    RowMatrix t = RowMatrix::Zero(m + 1, width);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double sign = b(i) < 0.0 ? -1.0 : 1.0;
        t.row(i).head(n) = sign * a_eq.row(i);
        t(i, n + i) = 1.0;
        t(i, width - 1) = sign * b(i);
    }
    for (Eigen::Index i = 0; i < m; ++i) t.row(m) -= t.row(i);
    for (Eigen::Index i = 0; i < m; ++i) t(m, n + i) = 0.0;

    std::vector<Eigen::Index> basis(m);
    for (Eigen::Index i = 0; i < m; ++i) basis[i] = n + i;

    constexpr double pivot_eps = 1e-12;
    const long max_pivots = 50L * (m + n) + 1000;
    for (long iter = 0; iter < max_pivots; ++iter) {
        Eigen::Index enter = -1;
        for (Eigen::Index j = 0; j < n + m; ++j)
            if (t(m, j) < -pivot_eps) {
                enter = j;
                break;
            }
        if (enter < 0) break;

        Eigen::Index leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m; ++i) {
            const double coef = t(i, enter);
            if (coef <= pivot_eps) continue;
            const double ratio = t(i, width - 1) / coef;
            if (ratio < best_ratio - 1e-15 ||
                (ratio <= best_ratio + 1e-15 && leave >= 0 && basis[i] < basis[leave])) {
                best_ratio = std::min(best_ratio, ratio);
                leave = i;
            }
        }
        if (leave < 0) break;  // unbounded direction cannot occur in phase one

        t.row(leave) /= t(leave, enter);
        for (Eigen::Index i = 0; i <= m; ++i) {
            if (i == leave) continue;
            const double factor = t(i, enter);
            if (factor != 0.0) t.row(i) -= factor * t.row(leave);
        }
        basis[leave] = enter;
    }
    Vector x = Vector::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i)
        if (basis[i] < n) x(basis[i]) = std::max(0.0, t(i, width - 1));
    return {std::max(0.0, -t(m, width - 1)), std::move(x)};
}

double phase_one_residual(const Matrix& a_eq, const Vector& b) { return phase_one(a_eq, b).residual; }

}  // namespace boundlab::detail
