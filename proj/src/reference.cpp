#include "boundlab/reference.hpp"

#include <cmath>
#include <vector>

namespace boundlab::reference {

Matrix kernel_under(const Mdp& mdp, const Matrix& w) {
    const int S = mdp.n_states();
    Matrix p = Matrix::Zero(S, S);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < mdp.n_actions(); ++a)
            for (int t = 0; t < S; ++t) p(s, t) += w(s, a) * mdp.transition(s, a, t);
    return p;
}

Vector reward_under(const Mdp& mdp, const Matrix& w) {
    Vector r = Vector::Zero(mdp.n_states());
    for (int s = 0; s < mdp.n_states(); ++s)
        for (int a = 0; a < mdp.n_actions(); ++a) r(s) += w(s, a) * mdp.reward(s, a);
    return r;
}

Vector value(const Mdp& mdp, const Matrix& w) {
    const int S = mdp.n_states();
    Matrix m = Matrix::Identity(S, S) - mdp.discount() * kernel_under(mdp, w);
    return m.fullPivLu().solve(reward_under(mdp, w));
}

Vector truncated_series_value(const Mdp& mdp, const Matrix& w, int horizon) {
    const Matrix p = kernel_under(mdp, w);
    Vector term = reward_under(mdp, w);
    Vector total = Vector::Zero(mdp.n_states());
    for (int t = 0; t < horizon; ++t) {
        total += term;
        term = mdp.discount() * (p * term);
    }
    return total;
}

double objective(const Mdp& mdp, const RowVector& nu, const Matrix& w) {
    return nu.dot(value(mdp, w));
}

double mixture_objective(const Mdp& mdp, const RowVector& nu, const Matrix& pi,
                         const Matrix& pi_prime, double alpha) {
    return objective(mdp, nu, (1.0 - alpha) * pi + alpha * pi_prime);
}

double central_difference(const Mdp& mdp, const RowVector& nu, const Matrix& pi,
                          const Matrix& pi_prime, double alpha) {
    return (mixture_objective(mdp, nu, pi, pi_prime, alpha) -
            mixture_objective(mdp, nu, pi, pi_prime, -alpha)) /
           (2.0 * alpha);
}

double fitted_exponent(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(x[i]);
        my += std::log(std::abs(y[i]));
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(std::abs(y[i])) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

}  // namespace boundlab::reference
