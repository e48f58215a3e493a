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

#include "qmemopt/adiabatic.h"
#include "qmemopt/kernel.h"
#include "qmemopt/special.h"

#include <algorithm>
#include <cmath>

namespace qmem {

Complex adiabatic_propagator(Complex a, double q, double u)
{
    const double diff = q - u;
    return std::exp(-a * (diff * diff)) * bessel_i0e(2.0 * a * (q * u));
}

namespace {

inline Complex propagator(Complex a, double q, double u)
{
    return adiabatic_propagator(a, q, u);
}

Eigen::VectorXd cumulative_trapezoid(const Eigen::VectorXd &f, double dx)
{
    Eigen::VectorXd out(f.size());
    out(0) = 0;
    for (Eigen::Index k = 1; k < f.size(); ++k) {
        out(k) = out(k - 1) + 0.5 * dx * (f(k - 1) + f(k));
    }
    return out;
}

} // namespace

DecayFunction decay_function(const ControlField &ctrl)
{
    return {ctrl.grid, cumulative_trapezoid(ctrl.samples.cwiseAbs2(), ctrl.grid.dtau())};
}

AdiabaticBracket::AdiabaticBracket(const SpinWave &s, const MediumParams &params) :
    m_params(params),
    m_a(1.0 / Complex(1.0, params.delta))
{
    const SpinWave reversed = flip(s);
    const Eigen::VectorXd &x = s.grid.nodes();
    m_sqrt_dzeta = (params.d * x.array()).sqrt().matrix();
    m_weighted = (reversed.samples.array() * s.grid.weights().array()).matrix();
}

Complex AdiabaticBracket::operator()(double h) const
{
    const double u = std::sqrt(std::max(h, 0.0));
    Complex sum = 0;
    for (Eigen::Index j = 0; j < m_weighted.size(); ++j) {
        sum += propagator(m_a, m_sqrt_dzeta(j), u) * m_weighted(j);
    }
    return m_a * sum;
}

AdiabaticOutput retrieve_adiabatic(const SpinWave &s, const ControlField &ctrl,
                                   const MediumParams &params)
{
    const AdiabaticBracket bracket(s, params);
    const DecayFunction h = decay_function(ctrl);
    const double sqrt_d = std::sqrt(params.d);
    Eigen::VectorXcd out(ctrl.grid.size());
    for (int k = 0; k < ctrl.grid.size(); ++k) {
        const Complex w = ctrl.samples(k);
        out(k) = (w == Complex(0.0)) ? Complex(0.0) : -sqrt_d * w * bracket(h.h(k));
    }
    AdiabaticOutput result{FieldMode(ctrl.grid, std::move(out)), h.h(ctrl.grid.size() - 1), true};
    result.adiabatic_ok = ctrl.grid.duration() * params.d >= 10.0;
    return result;
}

SpinWave store_adiabatic(const FieldMode &input, const ControlField &ctrl,
                         const MediumParams &params, const SpaceGrid &grid)
{
    if (!(input.grid == ctrl.grid)) {
        throw Error("store_adiabatic: input and control must share a time grid");
    }
    const Complex a = 1.0 / Complex(1.0, params.delta);
    const double sqrt_d = std::sqrt(params.d);
    // Remaining control energy, computed on the reversed samples so that it
    // matches the h of the time-reversed control exactly.
    const Eigen::VectorXd h_rev =
        cumulative_trapezoid(ctrl.samples.reverse().cwiseAbs2(), ctrl.grid.dtau());
    const Eigen::VectorXd tw = ctrl.grid.weights();
    const int nt = ctrl.grid.size();
    Eigen::VectorXcd drive(nt);
    Eigen::VectorXd u(nt);
    for (int k = 0; k < nt; ++k) {
        drive(k) = -sqrt_d * a * tw(k) * std::conj(ctrl.samples(k)) * input.samples(k);
        u(k) = std::sqrt(h_rev(nt - 1 - k));
    }
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        const double q = std::sqrt(params.d * grid.nodes()(i));
        Complex sum = 0;
        for (int k = 0; k < nt; ++k) {
            if (drive(k) != Complex(0.0)) {
                sum += propagator(a, q, u(k)) * drive(k);
            }
        }
        out(i) = sum;
    }
    return SpinWave(grid, std::move(out));
}

double default_h_max(const MediumParams &params)
{
    const double r = std::sqrt(params.d) + std::sqrt(40.0 * (1.0 + params.delta * params.delta));
    return std::max(50.0, r * r);
}

namespace {

// Tabulation of G(u) = d int_0^{u^2} |B(h')|^2 dh' on a uniform grid in u = sqrt(h).
struct CumulativeTable
{
    double du = 0;
    Eigen::VectorXd G;
    Eigen::VectorXd g; // dG/du

    double u_max() const { return du * (G.size() - 1); }

    // Smallest u with G(u) = c, searching from index `from`.
    double solve(double c, Eigen::Index &from) const
    {
        const Eigen::Index n = G.size();
        while (from < n - 2 && G(from + 1) < c) {
            ++from;
        }
        const Eigen::Index i = from;
        // Cubic Hermite on [u_i, u_i+1], bisection (G is nondecreasing).
        const double g0 = G(i), g1 = G(i + 1);
        const double m0 = g(i) * du, m1 = g(i + 1) * du;
        auto H = [&](double t) {
            const double t2 = t * t, t3 = t2 * t;
            return (2 * t3 - 3 * t2 + 1) * g0 + (t3 - 2 * t2 + t) * m0
                + (-2 * t3 + 3 * t2) * g1 + (t3 - t2) * m1;
        };
        double lo = 0, hi = 1;
        if (c <= g0) {
            return i * du;
        }
        if (c >= g1) {
            return (i + 1) * du;
        }
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (H(mid) < c) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return (i + 0.5 * (lo + hi)) * du;
    }
};

CumulativeTable tabulate(const AdiabaticBracket &bracket, const MediumParams &params, double h_max)
{
    const double u_max = std::sqrt(h_max);
    // Resolve the phase exp(-i delta h / (1 + delta^2)) in u.
    const double phase_rate = 2.0 * u_max * std::abs(params.delta) / (1.0 + params.delta * params.delta);
    const double du_target = std::min(0.02, 0.25 / std::max(1.0, phase_rate));
    const Eigen::Index n = std::max<Eigen::Index>(8, static_cast<Eigen::Index>(std::ceil(u_max / du_target)) + 1);
    CumulativeTable t;
    t.du = u_max / (n - 1);
    t.g.resize(n);
    t.G.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = i * t.du;
        t.g(i) = params.d * std::norm(bracket(u * u)) * 2.0 * u;
    }
    // Partial integrals of the local quadratic interpolant (third order).
    t.G(0) = 0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        double inc;
        if (i + 2 < n) {
            inc = t.du / 12.0 * (5 * t.g(i) + 8 * t.g(i + 1) - t.g(i + 2));
        } else {
            inc = t.du / 12.0 * (-t.g(i - 1) + 8 * t.g(i) + 5 * t.g(i + 1));
        }
        t.G(i + 1) = t.G(i) + std::max(inc, 0.0);
    }
    return t;
}

} // namespace

ShapedControl shape_retrieval_control(const SpinWave &s, const FieldMode &target,
                                      const MediumParams &params, double h_max)
{
    ShapedControl result;
    result.eta_r = retrieval_efficiency(s, params.d);
    if (!(result.eta_r > 0)) {
        throw Error("shape_retrieval_control: spin wave has zero retrieval efficiency");
    }
    result.h_max = h_max > 0 ? h_max : default_h_max(params);
    result.adiabatic_ok = target.grid.duration() * params.d >= 10.0;

    const AdiabaticBracket bracket(s, params);
    const CumulativeTable table = tabulate(bracket, params, result.h_max);
    const double G_max = table.G(table.G.size() - 1);

    const TimeGrid &grid = target.grid;
    const int nt = grid.size();
    const double norm = mode_norm2(target);
    const Eigen::VectorXd cum =
        cumulative_trapezoid(target.samples.cwiseAbs2(), grid.dtau()) / norm;

    Eigen::VectorXd h(nt);
    Eigen::Index from = 0;
    for (int k = 0; k < nt; ++k) {
        const double c = result.eta_r * cum(k);
        if (c >= G_max) {
            h(k) = result.h_max;
            result.truncated = result.truncated || c > G_max;
        } else {
            const double u = table.solve(c, from);
            h(k) = u * u;
        }
    }
    result.truncation_loss = std::max(0.0, 1.0 - G_max / result.eta_r);
    // A target that ends exactly at zero always needs h -> infinity in the
    // last sample; only report caps that cost a visible fraction.
    result.truncated = result.truncated && result.truncation_loss > 1e-6;

    // |omega|^2 = dh/dtau by centred differences, one-sided at the ends.
    const double dt = grid.dtau();
    Eigen::VectorXcd omega(nt);
    for (int k = 0; k < nt; ++k) {
        double rate;
        if (k == 0) {
            rate = (h(1) - h(0)) / dt;
        } else if (k == nt - 1) {
            rate = (h(k) - h(k - 1)) / dt;
        } else {
            rate = (h(k + 1) - h(k - 1)) / (2 * dt);
        }
        const double mag = std::sqrt(std::max(rate, 0.0));
        if (mag == 0) {
            omega(k) = 0;
            continue;
        }
        // Phase from E_out = -sqrt(d) omega B(h) = sqrt(eta) target.
        const Complex b = -bracket(h(k));
        const Complex t = target.samples(k);
        const Complex ratio = (std::abs(t) > 0) ? t / b : 1.0 / b;
        omega(k) = std::polar(mag, std::arg(ratio));
    }
    result.control = ControlField(grid, std::move(omega));
    result.h = decay_function(result.control);
    return result;
}

StorageControl optimal_storage_control(const FieldMode &input, const MediumParams &params,
                                       int kernel_nodes, double h_max)
{
    const SpaceGrid grid = SpaceGrid::gauss_legendre(kernel_nodes > 0 ? kernel_nodes
                                                                       : default_kernel_nodes);
    OptimalSpinWave opt = optimal_spin_wave(params.d, grid);
    StorageControl result;
    result.retrieval = shape_retrieval_control(opt.mode, time_reverse(input), params, h_max);
    result.control = time_reverse(result.retrieval.control);
    result.predicted_eta_s = opt.eta_r_max;
    result.optimal_mode = std::move(opt.mode);
    return result;
}

} // namespace qmem
