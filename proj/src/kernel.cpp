// Copyright (c) 2026 The qmemopt authors
//
// Permission is hereby granted, free of charge, to any person obtaining a
// copy of this software and associated documentation files (the "Software"),
// to deal in the Software without restriction, including without limitation
// the rights to use, copy, modify, merge, publish, distribute, sublicense,
// and/or sell copies of the Software, and to permit persons to whom the
// Software is furnished to do so, subject to the following conditions:
//
// The above copyright notice and this permission notice shall be included
// in all copies or substantial portions of the Software.
//
// THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
// IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
// FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
// THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
// LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING
// FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
// DEALINGS IN THE SOFTWARE.

#include "qmemopt/kernel.h"
#include "qmemopt/special.h"

#include <cmath>

namespace qmem {

double kernel_eval(double d, double zeta, double zeta_p)
{
    if (!(d > 0) || !std::isfinite(d)) {
        throw Error("kernel_eval: optical depth must be positive");
    }
    if (!(zeta >= 0 && zeta <= 1 && zeta_p >= 0 && zeta_p <= 1)) {
        throw Error("kernel_eval: positions must lie in [0, 1]");
    }
    const double a = std::sqrt(1.0 - zeta);
    const double b = std::sqrt(1.0 - zeta_p);
    const double diff = a - b;
    return 0.5 * d * std::exp(-0.5 * d * diff * diff) * bessel_i0e(d * a * b);
}

KernelOperator::KernelOperator(double d, SpaceGrid grid) :
    m_d(d), m_grid(std::move(grid))
{
    const int n = m_grid.size();
    const Eigen::VectorXd &x = m_grid.nodes();
    const Eigen::VectorXd &w = m_grid.weights();
    m_matrix.resize(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double k = kernel_eval(d, x(i), x(j));
            m_matrix(i, j) = w(j) * k;
            m_matrix(j, i) = w(i) * k;
        }
    }
}

Eigen::MatrixXd KernelOperator::symmetric_matrix() const
{
    const Eigen::VectorXd sw = m_grid.weights().cwiseSqrt();
    const Eigen::VectorXd isw = sw.cwiseInverse();
    return sw.asDiagonal() * m_matrix * isw.asDiagonal();
}

SpinWave KernelOperator::apply(const SpinWave &s) const
{
    if (!(s.grid == m_grid)) {
        return apply(resample(s, m_grid));
    }
    return SpinWave(m_grid, m_matrix * s.samples);
}

double KernelOperator::quadratic_form(const SpinWave &s) const
{
    const SpinWave ks = apply(s);
    return inner(resample(s, m_grid), ks).real();
}

double retrieval_efficiency(const SpinWave &s, double d)
{
    return KernelOperator(d, s.grid).quadratic_form(s);
}

OptimalSpinWave optimal_spin_wave(double d, const SpaceGrid &grid, double tol, int max_iter)
{
    if (!(tol > 0)) {
        throw Error("optimal_spin_wave: tolerance must be positive");
    }
    const KernelOperator op(d, grid);
    // Iterate on v = W^(1/2) s with the symmetric matrix so that the
    // Rayleigh quotient is the plain one.
    const Eigen::MatrixXd a = op.symmetric_matrix();
    const Eigen::VectorXd sw = grid.weights().cwiseSqrt();
    Eigen::VectorXd v = sw;
    v.normalize();
    double eig = v.dot(a * v);
    const double vec_tol = std::sqrt(tol);
    double last_change = 0;
    for (int it = 1; it <= max_iter; ++it) {
        Eigen::VectorXd av = a * v;
        Eigen::VectorXd next = av.normalized();
        const double next_eig = next.dot(a * next);
        const double change = (next - v).norm();
        v = std::move(next);
        // With a small spectral gap successive steps shrink slowly; scale by
        // the observed contraction to estimate the remaining distance.
        const double rho = it > 1 && last_change > 0 ? std::min(change / last_change, 0.999) : 0.999;
        const double slack = 1.0 / (1.0 - rho);
        const bool done = it > 1 && std::abs(next_eig - eig) * slack < tol && change * slack < vec_tol;
        last_change = change;
        eig = next_eig;
        if (done) {
            Eigen::VectorXd s = v.cwiseQuotient(sw);
            return {SpinWave(grid, s.cast<Complex>()), eig, it};
        }
    }
    Eigen::VectorXd s = v.cwiseQuotient(sw);
    throw ConvergenceError("optimal_spin_wave: power iteration did not converge",
                           SpinWave(grid, s.cast<Complex>()), eig);
}

OptimalSpinWave optimal_spin_wave(double d)
{
    return optimal_spin_wave(d, SpaceGrid::gauss_legendre(default_kernel_nodes));
}

} // namespace qmem
