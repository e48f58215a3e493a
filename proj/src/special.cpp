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

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qmem {

namespace {

constexpr double series_radius = 15.0;

// sum_k (z^2/4)^k / (k!)^2
template <typename T>
T i0_series(T z)
{
    const T q = z * z / 4.0;
    T term = 1.0;
    T sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= q / (double(k) * double(k));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum) && k > 2) {
            break;
        }
    }
    return sum;
}

// exp(-z) I0(z) ~ (2 pi z)^(-1/2) [ sum c_k / z^k
//                                   +/- i exp(-2z) sum (-1)^k c_k / z^k ]
// with c_k = c_{k-1} (2k-1)^2 / (8k); the sign follows Im z.
std::complex<double> i0e_asymptotic(std::complex<double> z, bool keep_reflected)
{
    std::complex<double> alt_sum = 1.0;
    std::complex<double> sum = 1.0;
    std::complex<double> zk = 1.0;
    double a = 1.0;
    double last = 1.0;
    for (int k = 1; k < 60; ++k) {
        a *= double((2 * k - 1) * (2 * k - 1)) / (8.0 * k);
        zk *= z;
        const std::complex<double> term = a / zk;
        const double mag = std::abs(term);
        if (mag > last) {
            break;
        }
        last = mag;
        alt_sum += (k % 2 == 0) ? term : -term;
        sum += term;
        if (mag < 1e-17) {
            break;
        }
    }
    const std::complex<double> pref = 1.0 / std::sqrt(2.0 * std::numbers::pi * z);
    std::complex<double> result = sum;
    if (keep_reflected) {
        const std::complex<double> i(0.0, z.imag() >= 0 ? 1.0 : -1.0);
        result += i * std::exp(-2.0 * z) * alt_sum;
    }
    return pref * result;
}

} // namespace

double bessel_i0e(double x)
{
    if (!(x >= 0)) {
        throw std::domain_error("bessel_i0e: negative or NaN argument");
    }
    if (x <= series_radius) {
        return std::exp(-x) * i0_series(x);
    }
    return i0e_asymptotic({x, 0.0}, false).real();
}

std::complex<double> bessel_i0e(std::complex<double> z)
{
    if (z.real() < 0) {
        // I0 is even; exp(-z) I0(z) = exp(-2z) * exp(z) I0(-z).
        return std::exp(-2.0 * z) * bessel_i0e(-z);
    }
    if (std::abs(z) <= series_radius) {
        return std::exp(-z) * i0_series(z);
    }
    return i0e_asymptotic(z, true);
}

double bessel_i0(double x)
{
    return std::exp(std::abs(x)) * bessel_i0e(std::abs(x));
}

double bessel_j0(double x)
{
    x = std::abs(x);
    if (x <= 14.0) {
        // Alternating series; cancellation costs about four digits at x = 14.
        const double q = -0.25 * x * x;
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k < 200; ++k) {
            term *= q / (double(k) * double(k));
            sum += term;
            if (std::abs(term) < 1e-17) {
                break;
            }
        }
        return sum;
    }
    // Hankel expansion J0 = sqrt(2/(pi x)) (P cos chi - Q sin chi), chi = x - pi/4.
    double a = 1.0;
    double p = 1.0;
    double q = 0.0;
    double xk = 1.0;
    double last = 1.0;
    for (int k = 1; k < 80; ++k) {
        a *= double((2 * k - 1) * (2 * k - 1)) / (8.0 * k);
        xk *= x;
        const double term = a / xk;
        if (term > last) {
            break;
        }
        last = term;
        // k odd feeds Q, k even feeds P; signs alternate within each.
        if (k % 2 == 1) {
            q += ((k / 2) % 2 == 0 ? -term : term);
        } else {
            p += ((k / 2) % 2 == 1 ? -term : term);
        }
        if (term < 1e-17) {
            break;
        }
    }
    const double chi = x - 0.25 * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

std::pair<Eigen::VectorXd, Eigen::VectorXd>
gauss_legendre(int n, double a, double b)
{
    if (n < 1) {
        throw std::invalid_argument("gauss_legendre: n must be positive");
    }
    Eigen::VectorXd x(n);
    Eigen::VectorXd w(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p0 = 1.0;
                p1 = z;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) {
                break;
            }
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0;
        double p1 = z;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = (n == 1) ? 1.0 : n * (z * p1 - p0) / (z * z - 1.0);
        const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
        // z decreases with i: place at the top end and mirror.
        x(n - 1 - i) = z;
        x(i) = -z;
        w(n - 1 - i) = wi;
        w(i) = wi;
    }
    if (n % 2 == 1) {
        x(m - 1) = 0.0;
    }
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    Eigen::VectorXd nodes = (mid + half * x.array()).matrix();
    Eigen::VectorXd weights = half * w;
    return {nodes, weights};
}

} // namespace qmem
