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

#ifndef QMEMOPT_ENSEMBLE_H
#define QMEMOPT_ENSEMBLE_H

#include "qmemopt/core.h"

namespace qmem {

// Field, optical and spin coherences on the simulator's cell-centred grid.
// E holds the field at cell centres; the output is carried separately.
struct EnsembleState
{
    SpaceGrid grid;
    Eigen::VectorXcd E;
    Eigen::VectorXcd P;
    Eigen::VectorXcd S;
    double tau = 0;

    EnsembleState() = default;
    EnsembleState(SpaceGrid g, double tau0 = 0);

    // sum_j w_j (|P_j|^2 + |S_j|^2)
    double excitation() const;
    double p_norm2() const;
    double s_norm2() const;

    SpinWave spin_wave() const { return SpinWave(grid, S); }
};

} // namespace qmem

#endif // QMEMOPT_ENSEMBLE_H
