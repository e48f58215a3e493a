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

#include "qmemopt/special.h"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

using namespace qmem;

namespace {

// exp(-z) I0(z) = (1/pi) int_0^pi exp(z (cos t - 1)) dt, by the periodic
// trapezoid rule, which converges geometrically.
std::complex<long double> i0e_quadrature(std::complex<double> z, int n = 40000)
{
    const std::complex<long double> zl(z.real(), z.imag());
    std::complex<long double> sum = 0;
    for (int k = 0; k < n; ++k) {
        const long double t = 2.0L * std::numbers::pi_v<long double> * k / n;
        sum += std::exp(zl * (std::cos(t) - 1.0L));
    }
    return sum / static_cast<long double>(n);
}

double rel_err(std::complex<double> a, std::complex<long double> b)
{
    const std::complex<double> bd(static_cast<double>(b.real()), static_cast<double>(b.imag()));
    return std::abs(a - bd) / std::abs(bd);
}

} // namespace

TEST_SUITE("special")
{
    TEST_CASE("scaled I0 on the real axis")
    {
        CHECK(bessel_i0e(0.0) == 1.0);
        for (double x : {1e-6, 0.3, 1.0, 5.0, 14.9, 15.1, 40.0, 300.0, 700.0}) {
            const double ref = std::exp(-x) * std::cyl_bessel_i(0.0, x);
            CHECK(std::abs(bessel_i0e(x) - ref) <= 1e-13 * ref);
        }
        for (double x : {1e3, 1e4, 1e6}) {
            CHECK(rel_err(bessel_i0e(std::complex<double>(x, 0.0)), i0e_quadrature(x)) < 1e-12);
            CHECK(std::abs(bessel_i0e(x) - bessel_i0e(std::complex<double>(x, 0.0)).real()) < 1e-16);
        }
        CHECK_THROWS(bessel_i0e(-1.0));
    }

    TEST_CASE("scaled I0 for the complex detuned arguments")
    {
        // 2 a q u with a = 1/(1 + i delta): the arguments the adiabatic maps use.
        for (double delta : {0.5, 1.0, 10.0, 50.0, -20.0}) {
            const std::complex<double> a = 1.0 / std::complex<double>(1.0, delta);
            for (double x : {0.01, 1.0, 8.0, 30.0, 200.0, 3000.0, 2e4}) {
                const std::complex<double> z = a * x;
                CAPTURE(z);
                CHECK(rel_err(bessel_i0e(z), i0e_quadrature(z)) < 1e-11);
            }
        }
    }

    TEST_CASE("scaled I0 off the right half plane")
    {
        for (std::complex<double> z : {std::complex<double>(-3.0, 1.0), std::complex<double>(-0.5, 20.0),
                                       std::complex<double>(0.0, 40.0), std::complex<double>(2.0, -60.0)}) {
            CAPTURE(z);
            CHECK(rel_err(bessel_i0e(z), i0e_quadrature(z)) < 1e-10);
        }
    }

    TEST_CASE("J0 against the standard library")
    {
        double worst = 0;
        for (double x = 0; x < 300; x += 0.0731) {
            worst = std::max(worst, std::abs(bessel_j0(x) - std::cyl_bessel_j(0.0, x)));
        }
        CHECK(worst < 1e-11);
        CHECK(bessel_j0(-2.5) == bessel_j0(2.5));
    }

    TEST_CASE("Gauss-Legendre integrates polynomials exactly")
    {
        const int n = 12;
        const auto [x, w] = gauss_legendre(n, 0.0, 1.0);
        for (int k = 0; k <= 2 * n - 1; ++k) {
            const double q = (w.array() * x.array().pow(k)).sum();
            CHECK(q == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
        }
        const auto [x1, w1] = gauss_legendre(1, -1.0, 1.0);
        CHECK(x1(0) == 0.0);
        CHECK(w1(0) == doctest::Approx(2.0));
        CHECK_THROWS(gauss_legendre(0, 0.0, 1.0));
    }
}
