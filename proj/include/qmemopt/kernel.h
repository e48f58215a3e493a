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

#ifndef QMEMOPT_KERNEL_H
#define QMEMOPT_KERNEL_H

#include "qmemopt/core.h"

namespace qmem {

// Backward-retrieval efficiency kernel
//   k_d(z, z') = (d/2) exp(-d (1 - (z + z')/2)) I0(d sqrt((1 - z)(1 - z'))),
// evaluated as (d/2) exp(-(d/2)(sqrt(1-z) - sqrt(1-z'))^2) i0e(...) so it
// stays finite for any d.
double kernel_eval(double d, double zeta, double zeta_p);

// Nystrom discretisation: matrix(i, j) = w_j k_d(zeta_i, zeta_j).
class KernelOperator
{
public:
    KernelOperator(double d, SpaceGrid grid);

    double d() const { return m_d; }
    const SpaceGrid &grid() const { return m_grid; }
    const Eigen::MatrixXd &matrix() const { return m_matrix; }

    // W^(1/2) k W^(1/2), symmetric with the same spectrum as matrix().
    Eigen::MatrixXd symmetric_matrix() const;

    // (K s)(zeta_i) = sum_j w_j k(zeta_i, zeta_j) s_j
    SpinWave apply(const SpinWave &s) const;

    // <s, K s>, real by symmetry of the kernel.
    double quadratic_form(const SpinWave &s) const;

private:
    double m_d;
    SpaceGrid m_grid;
    Eigen::MatrixXd m_matrix;
};

// Retrieval efficiency of a spin wave given in the retrieval frame.
double retrieval_efficiency(const SpinWave &s, double d);

struct OptimalSpinWave
{
    SpinWave mode;        // unit norm, real and positive
    double eta_r_max = 0; // dominant eigenvalue
    int iterations = 0;
};

class ConvergenceError : public Error
{
public:
    ConvergenceError(const std::string &what, SpinWave last, double last_eigenvalue) :
        Error(what), m_last(std::move(last)), m_eigenvalue(last_eigenvalue)
    {}
    const SpinWave &last_iterate() const { return m_last; }
    double last_eigenvalue() const { return m_eigenvalue; }

private:
    SpinWave m_last;
    double m_eigenvalue;
};

constexpr int default_kernel_nodes = 200;

// Power iteration from S = 1 with Rayleigh-quotient eigenvalue estimates.
// Converged when the estimated remaining change of the eigenvalue is < tol
// and that of the iterate is < sqrt(tol) in L2. Estimates divide the last
// step by (1 - contraction ratio).
OptimalSpinWave optimal_spin_wave(double d, const SpaceGrid &grid,
                                  double tol = 1e-10, int max_iter = 100000);

OptimalSpinWave optimal_spin_wave(double d);

} // namespace qmem

#endif // QMEMOPT_KERNEL_H
