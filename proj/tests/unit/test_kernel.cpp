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

#include "helpers.h"
#include "qmemopt/kernel.h"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace qmem;

namespace {

// Straight from the defining formula, for moderate d only.
double kernel_naive(double d, double z, double zp)
{
    return 0.5 * d * std::exp(-d * (1 - 0.5 * (z + zp)))
        * std::cyl_bessel_i(0.0, d * std::sqrt((1 - z) * (1 - zp)));
}

} // namespace

TEST_SUITE("kernel")
{
    TEST_CASE("kernel values")
    {
        for (double d : {0.3, 5.0, 40.0}) {
            for (double z : {0.0, 0.2, 0.77, 1.0}) {
                for (double zp : {0.0, 0.5, 0.93}) {
                    CHECK(kernel_eval(d, z, zp) == doctest::Approx(kernel_naive(d, z, zp)).epsilon(1e-12));
                    CHECK(kernel_eval(d, z, zp) == doctest::Approx(kernel_eval(d, zp, z)).epsilon(1e-14));
                }
            }
        }
        // Overflow-free at very large d.
        CHECK(std::isfinite(kernel_eval(1e5, 0.3, 0.31)));
        CHECK(kernel_eval(1e5, 1.0, 1.0) == doctest::Approx(0.5e5));
        CHECK_THROWS_AS(kernel_eval(1.0, 1.2, 0.5), Error);
        CHECK_THROWS_AS(kernel_eval(-1.0, 0.2, 0.5), Error);
    }

    TEST_CASE("retrieval efficiency against a brute-force double integral")
    {
        // 100 x 100 midpoint rule: 10^4 kernel evaluations.
        const int n = 100;
        const SpaceGrid mid = SpaceGrid::midpoint(n);
        const SpaceGrid gl = SpaceGrid::gauss_legendre(200);
        for (int which = 0; which < 3; ++which) {
            const SpinWave sm = test::smooth_wave(mid, which);
            const SpinWave sg = normalized(test::smooth_wave(gl, which));
            for (double d : {1.0, 10.0}) {
                Complex num = 0;
                for (int i = 0; i < n; ++i) {
                    for (int j = 0; j < n; ++j) {
                        num += std::conj(sm.samples(i)) * kernel_eval(d, mid.nodes()(i), mid.nodes()(j))
                            * sm.samples(j);
                    }
                }
                const double brute = num.real() / (n * n) / spinwave_norm2(sm);
                CAPTURE(which);
                CAPTURE(d);
                CHECK(retrieval_efficiency(sg, d) == doctest::Approx(brute).epsilon(1e-3));
            }
        }
    }

    TEST_CASE("quadratic form and apply agree")
    {
        const SpaceGrid g = SpaceGrid::gauss_legendre(80);
        const KernelOperator K(7.0, g);
        const SpinWave s = test::smooth_wave(g, 1);
        const Complex viaApply = inner(s, K.apply(s));
        CHECK(K.quadratic_form(s) == doctest::Approx(viaApply.real()).epsilon(1e-12));
        CHECK(std::abs(viaApply.imag()) < 1e-12);
        const Eigen::MatrixXd S = K.symmetric_matrix();
        CHECK((S - S.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }

    TEST_CASE("power iteration agrees with a dense eigensolve")
    {
        for (double d : {1.0, 10.0, 100.0, 1000.0}) {
            const SpaceGrid g = SpaceGrid::gauss_legendre(200);
            const OptimalSpinWave opt = optimal_spin_wave(d, g);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(KernelOperator(d, g).symmetric_matrix());
            const double top = es.eigenvalues()(g.size() - 1);
            CAPTURE(d);
            CHECK(opt.eta_r_max == doctest::Approx(top).epsilon(1e-9));
            // eigenvector of W^(1/2) K W^(-1/2) is W^(1/2) s
            const Eigen::VectorXd v = es.eigenvectors().col(g.size() - 1);
            Eigen::VectorXcd s = (v.array() / g.weights().array().sqrt()).matrix().cast<Complex>();
            CHECK(phase_aligned_distance(normalized(SpinWave(g, s)), opt.mode) < 1e-4);
            CHECK(spinwave_norm2(opt.mode) == doctest::Approx(1.0));
            CHECK(opt.mode.samples.real().minCoeff() > 0);
        }
    }

    TEST_CASE("eigenvalue grows with d and approaches one")
    {
        double last = 0;
        for (double d : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 100.0, 300.0, 1000.0}) {
            const double eta = optimal_spin_wave(d).eta_r_max;
            CHECK(eta > last);
            CHECK(eta < 1.0);
            last = eta;
        }
        CHECK(last > 0.99);
        // Thin medium: k ~ d/2, so eta ~ d/2.
        CHECK(optimal_spin_wave(1e-3).eta_r_max == doctest::Approx(0.5e-3).epsilon(1e-2));
    }

    TEST_CASE("regression values of the largest eigenvalue")
    {
        // Frozen from the dense eigensolve above.
        const std::pair<double, double> golden[] = {
            {1.0, 0.3304778007}, {10.0, 0.8142144764}, {100.0, 0.9745142379}, {1000.0, 0.9972159755}};
        for (const auto &[d, eta] : golden) {
            CHECK(optimal_spin_wave(d).eta_r_max == doctest::Approx(eta).epsilon(1e-9));
        }
    }

    TEST_CASE("grid refinement")
    {
        const double a = optimal_spin_wave(30.0, SpaceGrid::gauss_legendre(100)).eta_r_max;
        const double b = optimal_spin_wave(30.0, SpaceGrid::gauss_legendre(200)).eta_r_max;
        CHECK(std::abs(a - b) < 1e-10);
    }

    TEST_CASE("non-convergence carries the last iterate")
    {
        try {
            optimal_spin_wave(100.0, SpaceGrid::gauss_legendre(100), 1e-14, 2);
            FAIL("expected ConvergenceError");
        } catch (const ConvergenceError &e) {
            CHECK(e.last_iterate().grid.size() == 100);
            CHECK(e.last_eigenvalue() > 0);
        }
    }
}
