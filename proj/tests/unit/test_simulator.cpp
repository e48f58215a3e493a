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
#include "qmemopt/adiabatic.h"
#include "qmemopt/fast.h"
#include "qmemopt/kernel.h"
#include "qmemopt/optimizer.h"
#include "qmemopt/reference.h"
#include "qmemopt/simulator.h"

#include <doctest.h>

using namespace qmem;

namespace {

double rel_distance(const FieldMode &a, const FieldMode &b)
{
    const Eigen::VectorXd &w = a.grid.weights();
    return test::l2(a.samples - b.samples, w) / test::l2(b.samples, w);
}

SimulationOptions fixed_step(double dtau)
{
    SimulationOptions o;
    o.dtau_max = dtau;
    o.auto_refine = false;
    return o;
}

} // namespace

TEST_SUITE("simulator")
{
    TEST_CASE("no control: nothing is stored, the pulse leaks or decays")
    {
        const FieldMode in = make_reference_input(20.0, 2001);
        const MediumParams p(10.0);
        const SimulationResult r = simulate_storage(in, ControlField::constant(in.grid, 0.0), p);
        CHECK(r.final_state.S.norm() == 0.0);
        CHECK(r.breakdown.eta_storage == 0.0);
        CHECK(r.breakdown.leak_fraction + r.breakdown.decay_fraction == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(energy_audit(r).defect < 1e-4);
    }

    TEST_CASE("an almost transparent medium lets the pulse through")
    {
        const FieldMode in = make_reference_input(20.0, 2001);
        const SimulationResult r = simulate_storage(in, ControlField::constant(in.grid, 1.0), MediumParams(1e-4));
        CHECK(r.breakdown.leak_fraction > 0.999);
        CHECK(r.breakdown.eta_storage < 1e-3);
    }

    TEST_CASE("storage is linear in the input")
    {
        const TimeGrid g = TimeGrid::span(0.0, 10.0, 501);
        const FieldMode a = make_reference_input(10.0, g);
        Eigen::VectorXcd v(g.size());
        for (int k = 0; k < g.size(); ++k) {
            v(k) = Complex(std::sin(std::numbers::pi * g.tau(k) / 10.0), 0.5);
        }
        const FieldMode b(g, v);
        const ControlField c = ControlField::constant(g, Complex(1.0, 0.3));
        const MediumParams p(5.0, 2.0);
        const SimulationOptions o = fixed_step(0.02);
        const Complex alpha(0.7, -1.2), beta(2.0, 0.0);
        FieldMode mix(g, alpha * a.samples + beta * b.samples);
        const Eigen::VectorXcd sa = simulate_storage(a, c, p, o).final_state.S;
        const Eigen::VectorXcd sb = simulate_storage(b, c, p, o).final_state.S;
        const Eigen::VectorXcd sm = simulate_storage(mix, c, p, o).final_state.S;
        CHECK((sm - alpha * sa - beta * sb).norm() < 1e-10 * sm.norm());
    }

    TEST_CASE("without polarization decay the excitation is conserved")
    {
        const FieldMode in = make_reference_input(20.0, 2001);
        SimulationOptions o;
        o.polarization_decay = false;
        o.drain = false;
        const SimulationResult r = simulate_storage(in, ControlField::constant(in.grid, 0.8), MediumParams(10.0), o);
        const AuditReport a = energy_audit(r);
        CHECK(a.decay == 0.0);
        CHECK(std::abs(a.input - a.output - a.final_excitation) < 1e-5);
    }

    TEST_CASE("fourth-order convergence of the energy defect")
    {
        const TimeGrid g = TimeGrid::span(0.0, 20.0, 201);
        const FieldMode in = make_reference_input(20.0, g);
        const ControlField c = ControlField::constant(g, 1.0);
        std::vector<double> defects;
        for (double h : {0.1, 0.05, 0.025}) {
            defects.push_back(energy_audit(simulate_storage(in, c, MediumParams(10.0), fixed_step(h))).defect);
        }
        CAPTURE(defects[0]);
        CAPTURE(defects[1]);
        CAPTURE(defects[2]);
        for (int k = 0; k < 2; ++k) {
            const double ratio = defects[k] / defects[k + 1];
            CHECK(ratio > 10.0);
            CHECK(ratio < 25.0);
        }
    }

    TEST_CASE("adiabatic retrieval agrees with the full equations for slow controls")
    {
        // The shape error is first order in 1/(T d): halve it by doubling T.
        const double d = 10.0;
        const MediumParams p(d);
        const SpinWave s = optimal_spin_wave(d).mode;
        std::vector<double> dist;
        for (double T : {50.0, 100.0, 200.0}) {
            const TimeGrid g = TimeGrid::span(0.0, T, 4001);
            const ControlField c = completing_control(g, 20.0, 0.3);
            const FieldMode ad = retrieve_adiabatic(s, c, p).output;
            const FieldMode sim = simulate_retrieval(s, c, p, Direction::forward).output_mode;
            CHECK(std::abs(mode_norm2(sim) - mode_norm2(ad)) < 1e-4);
            dist.push_back(rel_distance(sim, ad));
        }
        CAPTURE(dist[0]);
        CAPTURE(dist[1]);
        CAPTURE(dist[2]);
        CHECK(dist[0] / dist[1] > 1.6);
        CHECK(dist[1] / dist[2] > 1.6);
        CHECK(dist[2] < 1e-2);
    }

    TEST_CASE("fast retrieval agrees with the closed form")
    {
        const double d = 10.0;
        const SpinWave s = optimal_spin_wave(d).mode;
        const TimeGrid g = fast_output_grid(s, d);
        const FieldMode sim = simulate_fast_retrieval(s, g, MediumParams(d)).output_mode;
        const FieldMode ref = retrieve_fast(s, d, g);
        CHECK(rel_distance(sim, ref) < 1e-3);
    }

    TEST_CASE("empty medium retrieves nothing")
    {
        const TimeGrid g = TimeGrid::span(0.0, 10.0, 501);
        const SpinWave zero = SpinWave::constant(SpaceGrid::midpoint(256), 0.0);
        const SimulationResult r =
            simulate_retrieval(zero, ControlField::constant(g, 2.0), MediumParams(10.0), Direction::backward);
        CHECK(r.output_mode.samples.norm() == 0.0);
        CHECK(r.breakdown.eta_retrieval == 0.0);
    }

    TEST_CASE("retrieval efficiency does not depend on the control shape")
    {
        const double d = 10.0;
        const MediumParams p(d);
        const SpinWave s = normalized(test::smooth_wave(SpaceGrid::gauss_legendre(200), 1));
        const double eta = retrieval_efficiency(s, d);
        const TimeGrid g = TimeGrid::span(0.0, 20.0, 2001);
        const double h = default_h_max(p);
        const ControlField smooth = completing_control(g, h);
        const ControlField sharp = completing_control(g, h, 0.3);
        for (const ControlField &c : {smooth, sharp}) {
            const SimulationResult r = simulate_retrieval(s, c, p, Direction::forward);
            CHECK(std::abs(r.breakdown.eta_retrieval - eta) < 2e-3);
        }
    }

    TEST_CASE("backward retrieval of the optimal stored wave")
    {
        const double d = 10.0;
        const MediumParams p(d);
        const OptimalSpinWave opt = optimal_spin_wave(d);
        const TimeGrid g = TimeGrid::span(0.0, 20.0, 2001);
        const SimulationResult r =
            simulate_retrieval(flip(opt.mode), completing_control(g, default_h_max(p)), p, Direction::backward);
        CHECK(std::abs(r.breakdown.eta_retrieval - opt.eta_r_max) < 1e-3);
        CHECK(r.breakdown.residual_fraction < 1e-3);
        CHECK(energy_audit(r).defect < 1e-4);
    }

    TEST_CASE("spatial grid convergence")
    {
        const FieldMode in = make_reference_input(20.0, 2001);
        const MediumParams p(10.0);
        const StorageControl sc = optimal_storage_control(in, p);
        SimulationOptions coarse, fine;
        fine.n_zeta = 512;
        const double a = simulate_storage(in, sc.control, p, coarse).breakdown.eta_storage;
        const double b = simulate_storage(in, sc.control, p, fine).breakdown.eta_storage;
        CHECK(std::abs(a - b) < 1e-4);
    }

    TEST_CASE("resonant real drive keeps S real and P imaginary")
    {
        const FieldMode in = make_reference_input(20.0, 2001);
        SimulationOptions o;
        o.drain = false;
        const SimulationResult r = simulate_storage(in, ControlField::constant(in.grid, 0.9), MediumParams(10.0), o);
        CHECK(r.final_state.S.imag().cwiseAbs().maxCoeff() < 1e-14);
        CHECK(r.final_state.P.real().cwiseAbs().maxCoeff() < 1e-14);
        CHECK(r.output_mode.samples.imag().cwiseAbs().maxCoeff() < 1e-14);
    }

    TEST_CASE("oversized steps are reported as an instability")
    {
        const TimeGrid g = TimeGrid::span(0.0, 20.0, 21);
        const FieldMode in = make_reference_input(20.0, g);
        CHECK_THROWS_AS(simulate_storage(in, ControlField::constant(g, 0.1), MediumParams(100.0), fixed_step(1.0)),
                        InstabilityError);
        CHECK_THROWS_AS(simulate_storage(in, ControlField::constant(TimeGrid::span(0.0, 20.0, 11), 1.0),
                                         MediumParams(1.0)),
                        Error);
    }

    TEST_CASE("optimal storage control in the full equations")
    {
        const FieldMode in = make_reference_input(20.0, 2001);
        const double eta = optimal_spin_wave(10.0).eta_r_max;
        for (double delta : {0.0, 50.0}) {
            const MediumParams p(10.0, delta);
            const StorageControl sc = optimal_storage_control(in, p);
            const SimulationResult r = simulate_storage(in, sc.control, p);
            CAPTURE(delta);
            CHECK(std::abs(r.breakdown.eta_storage - eta) < 5e-3);
            CHECK(phase_aligned_distance(normalized(r.final_state.spin_wave()),
                                         resample(flip(sc.optimal_mode), r.final_state.grid))
                  < 3e-2);
            CHECK(energy_audit(r).defect < 1e-4);
        }
    }
}
