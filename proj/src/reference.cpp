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

#include "qmemopt/reference.h"

#include <cmath>

namespace qmem {

FieldMode make_reference_input(double T, const TimeGrid &grid, const ReferenceInputSpec &spec)
{
    if (!(T > 0)) {
        throw Error("make_reference_input: duration must be positive");
    }
    const double c = spec.center_fraction * T;
    const double sigma = spec.sigma_fraction * T;
    const double floor = std::exp(-c * c / (2 * sigma * sigma));
    Eigen::VectorXcd s(grid.size());
    for (int k = 0; k < grid.size(); ++k) {
        const double t = grid.tau(k);
        if (t <= 0 || t >= T) {
            s(k) = 0;
            continue;
        }
        const double x = t - c;
        s(k) = std::max(0.0, std::exp(-x * x / (2 * sigma * sigma)) - floor);
    }
    return normalized(FieldMode(grid, std::move(s)));
}

FieldMode make_reference_input(double T, int n)
{
    return make_reference_input(T, TimeGrid::span(0.0, T, n));
}

} // namespace qmem
