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

#ifndef QMEMOPT_SPECIAL_H
#define QMEMOPT_SPECIAL_H

#include <complex>
#include <utility>

#include <Eigen/Dense>

namespace qmem {

// Exponentially scaled modified Bessel function, exp(-x) I0(x), x >= 0.
double bessel_i0e(double x);

// exp(-z) I0(z) for Re z >= 0. Power series for |z| <= 15, Hankel
// expansion (both exponentials kept) beyond.
std::complex<double> bessel_i0e(std::complex<double> z);

// I0 itself; overflows for x > ~700.
double bessel_i0(double x);

double bessel_j0(double x);

// Gauss-Legendre nodes and weights on [a, b], nodes ascending.
std::pair<Eigen::VectorXd, Eigen::VectorXd>
gauss_legendre(int n, double a = 0.0, double b = 1.0);

} // namespace qmem

#endif // QMEMOPT_SPECIAL_H
