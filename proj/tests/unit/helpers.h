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

#ifndef QMEMOPT_TEST_HELPERS_H
#define QMEMOPT_TEST_HELPERS_H

#include "qmemopt/core.h"

#include <cmath>
#include <numbers>

namespace qmem::test {

// Three fixed smooth spin waves used across suites.
inline SpinWave smooth_wave(const SpaceGrid &grid, int which)
{
    Eigen::VectorXcd v(grid.size());
    for (int j = 0; j < grid.size(); ++j) {
        const double z = grid.nodes()(j);
        switch (which) {
        case 0:
            v(j) = 1.0 + z * z - 0.5 * std::sin(3 * z);
            break;
        case 1:
            v(j) = Complex(std::exp(-4 * (z - 0.3) * (z - 0.3)), 0.3 * std::cos(5 * z));
            break;
        default:
            v(j) = Complex(std::cos(std::numbers::pi * z), 0.2 * z);
            break;
        }
    }
    return SpinWave(grid, std::move(v));
}

inline double l2(const Eigen::VectorXcd &a, const Eigen::VectorXd &w)
{
    return std::sqrt(w.dot(a.cwiseAbs2()));
}

} // namespace qmem::test

#endif
