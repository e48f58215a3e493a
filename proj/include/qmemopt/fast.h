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

#ifndef QMEMOPT_FAST_H
#define QMEMOPT_FAST_H

#include "qmemopt/core.h"
#include "qmemopt/ensemble.h"

namespace qmem {

// Output after an ideal resonant pi-pulse at tau = 0:
//   E_out(tau) = -sqrt(d) int_0^1 dzeta exp(-tau) J0(2 sqrt(d zeta tau)) s(1 - zeta),
// s in the retrieval frame.
FieldMode retrieve_fast(const SpinWave &s, double d, const TimeGrid &grid);

// Uniform grid on [0, tau_max], with tau_max doubled from 10 until the last
// 1% of the window adds less than 1e-4 of the output energy, and a step that
// resolves the 1/d structure of the pulse.
TimeGrid fast_output_grid(const SpinWave &s, double d);

// Ideal swap P -> iS, S -> iP; E is left alone.
EnsembleState pi_pulse(const EnsembleState &state);

struct FastInput
{
    FieldMode mode;      // unit norm
    double norm2 = 0;    // before normalisation; equals eta_r^max(d)
    double eta_r_max = 0;
};

// Time reverse of the fast output from the optimal spin wave.
FastInput optimal_fast_input(double d, const TimeGrid &grid);

} // namespace qmem

#endif // QMEMOPT_FAST_H
