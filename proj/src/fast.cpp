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

#include "qmemopt/fast.h"
#include "qmemopt/kernel.h"
#include "qmemopt/special.h"

#include <algorithm>
#include <cmath>

namespace qmem {

FieldMode retrieve_fast(const SpinWave &s, double d, const TimeGrid &grid)
{
    if (!(d > 0)) {
        throw Error("retrieve_fast: d must be positive");
    }
    const SpinWave r = flip(s);
    const Eigen::VectorXd &z = s.grid.nodes();
    const Eigen::VectorXcd ws = (s.grid.weights().array() * r.samples.array()).matrix();
    const double sqrt_d = std::sqrt(d);
    Eigen::VectorXcd out(grid.size());
    for (int k = 0; k < grid.size(); ++k) {
        const double tau = grid.tau(k);
        if (tau < 0) {
            throw Error("retrieve_fast: grid must start at tau >= 0");
        }
        Complex sum = 0;
        for (Eigen::Index j = 0; j < z.size(); ++j) {
            sum += bessel_j0(2.0 * std::sqrt(d * z(j) * tau)) * ws(j);
        }
        out(k) = -sqrt_d * std::exp(-tau) * sum;
    }
    return FieldMode(grid, std::move(out));
}

TimeGrid fast_output_grid(const SpinWave &s, double d)
{
    const double step = 0.01 / std::max(1.0, d);
    double tau_max = 10.0;
    for (int it = 0; it < 8; ++it) {
        const int n = static_cast<int>(std::ceil(tau_max / step)) + 1;
        const TimeGrid grid = TimeGrid::span(0.0, tau_max, n);
        const FieldMode out = retrieve_fast(s, d, grid);
        const double total = mode_norm2(out);
        const int tail_start = static_cast<int>(0.99 * (n - 1));
        const Eigen::VectorXd w = grid.weights();
        double tail = 0;
        for (int k = tail_start; k < n; ++k) {
            tail += w(k) * std::norm(out.samples(k));
        }
        if (total == 0 || tail < 1e-4 * total) {
            return grid;
        }
        tau_max *= 2;
    }
    throw Error("fast_output_grid: output does not decay");
}

EnsembleState pi_pulse(const EnsembleState &state)
{
    EnsembleState out = state;
    const Complex i(0.0, 1.0);
    out.P = i * state.S;
    out.S = i * state.P;
    return out;
}

FastInput optimal_fast_input(double d, const TimeGrid &grid)
{
    const OptimalSpinWave opt = optimal_spin_wave(d);
    const FieldMode out = retrieve_fast(opt.mode, d, grid);
    FastInput result;
    result.norm2 = mode_norm2(out);
    result.eta_r_max = opt.eta_r_max;
    if (!(result.norm2 > 0)) {
        throw Error("optimal_fast_input: empty output on this grid");
    }
    result.mode = normalized(time_reverse(out));
    return result;
}

} // namespace qmem
