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

#ifndef QMEMOPT_REFERENCE_H
#define QMEMOPT_REFERENCE_H

#include "qmemopt/core.h"

namespace qmem {

// Gaussian-like reference input on [0, T]: centre T/2, standard deviation
// sigma_fraction * T, shifted down so it vanishes at both ends, normalised.
struct ReferenceInputSpec
{
    double center_fraction = 0.5;
    double sigma_fraction = 0.15;
};

FieldMode make_reference_input(double T, const TimeGrid &grid,
                               const ReferenceInputSpec &spec = {});

// Convenience: n samples on [0, T].
FieldMode make_reference_input(double T, int n);

} // namespace qmem

#endif // QMEMOPT_REFERENCE_H
