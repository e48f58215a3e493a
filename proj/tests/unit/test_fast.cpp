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
#include "qmemopt/fast.h"
#include "qmemopt/kernel.h"
#include "qmemopt/reference.h"
#include "qmemopt/simulator.h"

#include <doctest.h>

using namespace qmem;

namespace {

double l2_state(const EnsembleState &a, const EnsembleState &b)
{
    const Eigen::VectorXd &w = a.grid.weights();
    return std::sqrt(w.dot((a.P - b.P).cwiseAbs2() + (a.S - b.S).cwiseAbs2()));
}

EnsembleState sample_state(int n)
{
    EnsembleState st(SpaceGrid::midpoint(n));
    for (int j = 0; j < n; ++j) {
        const double z = st.grid.nodes()(j);
        st.S(j) = Complex(std::exp(-z), 0.1 * z);
        st.P(j) = Complex(0.0, 0.2 * z);
        st.E(j) = 0.05;
    }
    return st;
}

} // namespace

TEST_SUITE("fast")
{
    TEST_CASE("first output sample")
    {
        const SpaceGrid g = SpaceGrid::gauss_legendre(100);
        const SpinWave s = test::smooth_wave(g, 1);
        const double d = 7.0;
        const FieldMode out = retrieve_fast(s, d, TimeGrid::span(0.0, 1.0, 11));
        const Complex expect = -std::sqrt(d) * (g.weights().cast<Complex>().array() * s.samples.array()).sum();
        CHECK(std::abs(out.samples(0) - expect) < 1e-12);
        CHECK_THROWS_AS(retrieve_fast(s, 0.0, TimeGrid::span(0.0, 1.0, 11)), Error);
    }

    TEST_CASE("output energy equals the kernel efficiency")
    {
        const SpaceGrid g = SpaceGrid::gauss_legendre(200);
        for (int which = 0; which < 3; ++which) {
            for (double d : {1.0, 10.0, 30.0}) {
                const SpinWave s = normalized(test::smooth_wave(g, which));
                const TimeGrid tg = fast_output_grid(s, d);
                CAPTURE(which);
                CAPTURE(d);
                CHECK(std::abs(mode_norm2(retrieve_fast(s, d, tg)) - retrieval_efficiency(s, d)) < 1e-3);
            }
        }
    }

    TEST_CASE("output duration scales as 1/d")
    {
        std::vector<double> t90;
        for (double d : {10.0, 30.0, 100.0}) {
            const OptimalSpinWave opt = optimal_spin_wave(d);
            const TimeGrid tg = TimeGrid::span(0.0, 10.0, 20001);
            const FieldMode out = retrieve_fast(opt.mode, d, tg);
            const double total = mode_norm2(out);
            double acc = 0;
            for (int k = 1; k < tg.size(); ++k) {
                acc += 0.5 * tg.dtau() * (std::norm(out.samples(k - 1)) + std::norm(out.samples(k)));
                if (acc >= 0.9 * total) {
                    t90.push_back(tg.tau(k) * d);
                    break;
                }
            }
        }
        REQUIRE(t90.size() == 3);
        // t90 * d stays put while d grows tenfold.
        for (double v : t90) {
            CHECK(v / t90[0] > 0.6);
            CHECK(v / t90[0] < 1.6);
        }
    }

    TEST_CASE("ideal pi-pulse")
    {
        EnsembleState st = sample_state(64);
        st.P.setZero();
        const EnsembleState once = pi_pulse(st);
        CHECK((once.P - Complex(0.0, 1.0) * st.S).norm() == 0.0);
        CHECK(once.S.norm() == 0.0);
        CHECK((once.E - st.E).norm() == 0.0);

        const EnsembleState full = sample_state(64);
        const EnsembleState twice = pi_pulse(pi_pulse(full));
        CHECK((twice.P + full.P).norm() < 1e-15);
        CHECK((twice.S + full.S).norm() < 1e-15);
        CHECK(pi_pulse(full).excitation() == full.excitation());
    }

    TEST_CASE("finite pulses converge to the ideal swap")
    {
        const double d = 10.0;
        const EnsembleState st = sample_state(256);
        const EnsembleState ideal = pi_pulse(st);
        double last = 1e300;
        for (double w : {10 * d, 100 * d, 1000 * d}) {
            const EnsembleState fin = evolve_pulse(st, w, 0.5 * std::numbers::pi / w, MediumParams(d));
            const double err = l2_state(fin, ideal);
            CHECK(err < last);
            last = err;
        }
        CHECK(last < 1e-3);
    }

    TEST_CASE("optimal fast input")
    {
        const double d = 30.0;
        const TimeGrid g = TimeGrid::span(0.0, 2.0, 4001);
        const FastInput fi = optimal_fast_input(d, g);
        CHECK(mode_norm2(fi.mode) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(fi.norm2 - fi.eta_r_max) < 1e-3);

        const SimulationResult r = simulate_fast_storage(fi.mode, MediumParams(d));
        CHECK(std::abs(r.breakdown.eta_storage - fi.eta_r_max) < 1e-2);
        CHECK(energy_audit(r).defect < 1e-4);

        // Perturbed inputs of the same duration store less.
        for (int m = 1; m <= 3; ++m) {
            Eigen::VectorXcd v = fi.mode.samples;
            for (int k = 0; k < g.size(); ++k) {
                v(k) += 0.3 * std::sin(m * std::numbers::pi * g.tau(k) / 2.0) * fi.mode.samples.cwiseAbs().maxCoeff();
            }
            const FieldMode pert = normalized(FieldMode(g, v));
            const SimulationResult rp = simulate_fast_storage(pert, MediumParams(d));
            CAPTURE(m);
            CHECK(rp.breakdown.eta_storage < r.breakdown.eta_storage);
        }
    }

    TEST_CASE("fast storage edge cases")
    {
        const TimeGrid g = TimeGrid::span(0.0, 2.0, 401);
        CHECK_THROWS_AS(simulate_fast_storage(make_reference_input(2.0, g), MediumParams(10.0, 1.0)), Error);
        const SimulationResult z = simulate_fast_storage(FieldMode::zero(g), MediumParams(10.0));
        CHECK(z.final_state.S.norm() == 0.0);

        // A long input is far from matched to the fast response.
        const double d = 30.0;
        const double best = optimal_spin_wave(d).eta_r_max;
        const FieldMode slow = make_reference_input(20.0, 2001);
        CHECK(simulate_fast_storage(slow, MediumParams(d)).breakdown.eta_storage < best - 0.3);
    }
}
