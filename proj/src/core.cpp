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

#include "qmemopt/core.h"
#include "qmemopt/special.h"

#include <algorithm>
#include <cmath>

namespace qmem {

MediumParams::MediumParams(double d_, double delta_) :
    d(d_), delta(delta_)
{
    if (!(d > 0) || !std::isfinite(d)) {
        throw Error("MediumParams: optical depth must be positive and finite");
    }
    if (!std::isfinite(delta)) {
        throw Error("MediumParams: detuning must be finite");
    }
}

TimeGrid::TimeGrid(double tau0, double dtau, int n) :
    m_tau0(tau0), m_dtau(dtau), m_n(n)
{
    if (!(dtau > 0) || n < 2 || !std::isfinite(tau0)) {
        throw Error("TimeGrid: need dtau > 0 and n >= 2");
    }
}

TimeGrid TimeGrid::span(double tau0, double duration, int n)
{
    if (n < 2) {
        throw Error("TimeGrid: need n >= 2");
    }
    return TimeGrid(tau0, duration / (n - 1), n);
}

Eigen::VectorXd TimeGrid::weights() const
{
    Eigen::VectorXd w = Eigen::VectorXd::Constant(m_n, m_dtau);
    w(0) *= 0.5;
    w(m_n - 1) *= 0.5;
    return w;
}

bool TimeGrid::operator==(const TimeGrid &other) const
{
    return m_n == other.m_n
        && std::abs(m_tau0 - other.m_tau0) <= 1e-12 * (1 + std::abs(m_tau0))
        && std::abs(m_dtau - other.m_dtau) <= 1e-12 * m_dtau;
}

SpaceGrid::SpaceGrid(Eigen::VectorXd nodes, Eigen::VectorXd weights,
                     SpaceGridKind kind) :
    m_nodes(std::move(nodes)), m_weights(std::move(weights)), m_kind(kind)
{
    const int n = static_cast<int>(m_nodes.size());
    if (n < 1 || m_weights.size() != n) {
        throw Error("SpaceGrid: nodes and weights must be non-empty and equally sized");
    }
    for (int j = 0; j < n; ++j) {
        if (m_nodes(j) < 0 || m_nodes(j) > 1 || !(m_weights(j) > 0)) {
            throw Error("SpaceGrid: nodes must lie in [0,1] with positive weights");
        }
        if (j > 0 && !(m_nodes(j) > m_nodes(j - 1))) {
            throw Error("SpaceGrid: nodes must be strictly increasing");
        }
    }
    if (std::abs(m_weights.sum() - 1.0) > 1e-12) {
        throw Error("SpaceGrid: weights must sum to 1");
    }
}

SpaceGrid SpaceGrid::gauss_legendre(int n)
{
    auto [x, w] = qmem::gauss_legendre(n, 0.0, 1.0);
    // Remove the last-ulp drift so the weight-sum invariant holds exactly.
    w /= w.sum();
    return SpaceGrid(std::move(x), std::move(w), SpaceGridKind::gauss_legendre);
}

SpaceGrid SpaceGrid::midpoint(int n)
{
    Eigen::VectorXd x(n);
    for (int j = 0; j < n; ++j) {
        x(j) = (j + 0.5) / n;
    }
    return SpaceGrid(std::move(x), Eigen::VectorXd::Constant(n, 1.0 / n),
                     SpaceGridKind::midpoint);
}

bool SpaceGrid::is_symmetric(double tol) const
{
    const int n = size();
    for (int j = 0; j < n; ++j) {
        if (std::abs(m_nodes(j) + m_nodes(n - 1 - j) - 1.0) > tol
            || std::abs(m_weights(j) - m_weights(n - 1 - j)) > tol) {
            return false;
        }
    }
    return true;
}

bool SpaceGrid::operator==(const SpaceGrid &other) const
{
    return size() == other.size()
        && (m_nodes - other.m_nodes).cwiseAbs().maxCoeff() <= 1e-14
        && (m_weights - other.m_weights).cwiseAbs().maxCoeff() <= 1e-14;
}

FieldMode::FieldMode(TimeGrid g, Eigen::VectorXcd s) :
    grid(g), samples(std::move(s))
{
    if (samples.size() != grid.size()) {
        throw Error("FieldMode: sample count does not match grid");
    }
}

FieldMode FieldMode::zero(const TimeGrid &g)
{
    return FieldMode(g, Eigen::VectorXcd::Zero(g.size()));
}

ControlField::ControlField(TimeGrid g, Eigen::VectorXcd s) :
    grid(g), samples(std::move(s))
{
    if (samples.size() != grid.size()) {
        throw Error("ControlField: sample count does not match grid");
    }
    if (!samples.allFinite()) {
        throw Error("ControlField: non-finite samples");
    }
}

ControlField ControlField::constant(const TimeGrid &g, Complex omega)
{
    return ControlField(g, Eigen::VectorXcd::Constant(g.size(), omega));
}

SpinWave::SpinWave(SpaceGrid g, Eigen::VectorXcd s) :
    grid(std::move(g)), samples(std::move(s))
{
    if (samples.size() != grid.size()) {
        throw Error("SpinWave: sample count does not match grid");
    }
}

SpinWave SpinWave::constant(const SpaceGrid &g, Complex value)
{
    return SpinWave(g, Eigen::VectorXcd::Constant(g.size(), value));
}

std::string nondimensionalize_doc()
{
    return
        "Units: tau = gamma (t - z/c) (comoving frame), zeta = z/L,\n"
        "omega = Omega/gamma, delta = Delta/gamma, d = g^2 N L/(gamma c).\n"
        "The field is rescaled as E~ = E sqrt(c/(L gamma)) so that\n"
        "integral |E~|^2 dtau is a photon-number fraction. The system reads\n"
        "  dE~/dzeta = i sqrt(d) P\n"
        "  dP/dtau   = -(1 + i delta) P + i sqrt(d) E~ + i omega(tau) S\n"
        "  dS/dtau   = i conj(omega(tau)) P\n"
        "Retardation L/c is absorbed by the comoving frame. Spin-wave\n"
        "norms are integral |S|^2 dzeta over [0, 1].\n";
}

double mode_norm2(const FieldMode &mode)
{
    return mode.grid.weights().dot(mode.samples.cwiseAbs2());
}

double control_energy(const ControlField &ctrl)
{
    return ctrl.grid.weights().dot(ctrl.samples.cwiseAbs2());
}

double spinwave_norm2(const SpinWave &s)
{
    return s.grid.weights().dot(s.samples.cwiseAbs2());
}

Complex inner(const FieldMode &a, const FieldMode &b)
{
    if (!(a.grid == b.grid)) {
        throw Error("inner: field modes live on different grids");
    }
    const Eigen::VectorXd w = a.grid.weights();
    return (a.samples.conjugate().array() * b.samples.array() * w.array()).sum();
}

Complex inner(const SpinWave &a, const SpinWave &b)
{
    if (!(a.grid == b.grid)) {
        throw Error("inner: spin waves live on different grids");
    }
    return (a.samples.conjugate().array() * b.samples.array()
            * a.grid.weights().array()).sum();
}

SpinWave flip(const SpinWave &s)
{
    if (!s.grid.is_symmetric()) {
        throw Error("flip: spatial grid is not symmetric under zeta -> 1 - zeta");
    }
    return SpinWave(s.grid, s.samples.reverse());
}

FieldMode time_reverse(const FieldMode &mode)
{
    return FieldMode(mode.grid, mode.samples.reverse().conjugate());
}

ControlField time_reverse(const ControlField &ctrl)
{
    return ControlField(ctrl.grid, ctrl.samples.reverse().conjugate());
}

SpinWave conj(const SpinWave &s)
{
    return SpinWave(s.grid, s.samples.conjugate());
}

FieldMode normalized(const FieldMode &mode)
{
    const double n2 = mode_norm2(mode);
    if (!(n2 > 0)) {
        throw Error("normalized: zero field mode");
    }
    return FieldMode(mode.grid, mode.samples / std::sqrt(n2));
}

SpinWave normalized(const SpinWave &s)
{
    const double n2 = spinwave_norm2(s);
    if (!(n2 > 0)) {
        throw Error("normalized: zero spin wave");
    }
    return SpinWave(s.grid, s.samples / std::sqrt(n2));
}

FieldMode operator*(Complex a, const FieldMode &m)
{
    return FieldMode(m.grid, a * m.samples);
}

SpinWave operator*(Complex a, const SpinWave &s)
{
    return SpinWave(s.grid, a * s.samples);
}

namespace {

// || a e^{i phi} - b || minimised over phi.
double aligned_distance(double na2, double nb2, Complex overlap)
{
    return std::sqrt(std::max(0.0, na2 + nb2 - 2 * std::abs(overlap)));
}

// Barycentric weights for arbitrary nodes, normalized to avoid overflow.
Eigen::VectorXd barycentric_weights(const Eigen::VectorXd &x)
{
    const int n = static_cast<int>(x.size());
    Eigen::VectorXd lw(n);
    Eigen::VectorXi sign(n);
    for (int j = 0; j < n; ++j) {
        double acc = 0;
        int sg = 1;
        for (int k = 0; k < n; ++k) {
            if (k == j) {
                continue;
            }
            const double diff = x(j) - x(k);
            acc -= std::log(std::abs(diff));
            if (diff < 0) {
                sg = -sg;
            }
        }
        lw(j) = acc;
        sign(j) = sg;
    }
    const double shift = lw.maxCoeff();
    Eigen::VectorXd w(n);
    for (int j = 0; j < n; ++j) {
        w(j) = sign(j) * std::exp(lw(j) - shift);
    }
    return w;
}

Complex cubic_local(const Eigen::VectorXd &x, const Eigen::VectorXcd &y, double t)
{
    const int n = static_cast<int>(x.size());
    if (n == 1) {
        return y(0);
    }
    int i = static_cast<int>(std::upper_bound(x.data(), x.data() + n, t) - x.data()) - 1;
    // Four-point stencil around the interval, clamped to the grid.
    const int m = std::min(n, 4);
    int start = std::clamp(i - 1, 0, n - m);
    Complex sum = 0;
    for (int a = start; a < start + m; ++a) {
        double l = 1.0;
        for (int b = start; b < start + m; ++b) {
            if (b != a) {
                l *= (t - x(b)) / (x(a) - x(b));
            }
        }
        sum += l * y(a);
    }
    return sum;
}

} // namespace

double phase_aligned_distance(const SpinWave &a, const SpinWave &b)
{
    return aligned_distance(spinwave_norm2(a), spinwave_norm2(b), inner(b, a));
}

double phase_aligned_distance(const FieldMode &a, const FieldMode &b)
{
    return aligned_distance(mode_norm2(a), mode_norm2(b), inner(b, a));
}

SpinWave resample(const SpinWave &s, const SpaceGrid &target)
{
    if (s.grid == target) {
        return s;
    }
    const Eigen::VectorXd &x = s.grid.nodes();
    const int n = static_cast<int>(x.size());
    Eigen::VectorXcd out(target.size());
    if (s.grid.kind() == SpaceGridKind::gauss_legendre) {
        const Eigen::VectorXd w = barycentric_weights(x);
        for (int i = 0; i < target.size(); ++i) {
            const double t = target.nodes()(i);
            Complex num = 0;
            double den = 0;
            bool exact = false;
            for (int j = 0; j < n; ++j) {
                const double diff = t - x(j);
                if (diff == 0) {
                    out(i) = s.samples(j);
                    exact = true;
                    break;
                }
                const double c = w(j) / diff;
                num += c * s.samples(j);
                den += c;
            }
            if (!exact) {
                out(i) = num / den;
            }
        }
    } else {
        for (int i = 0; i < target.size(); ++i) {
            out(i) = cubic_local(x, s.samples, target.nodes()(i));
        }
    }
    return SpinWave(target, std::move(out));
}

FieldMode resample(const FieldMode &mode, const TimeGrid &target)
{
    if (mode.grid == target) {
        return mode;
    }
    Eigen::VectorXcd out(target.size());
    const int n = mode.grid.size();
    for (int k = 0; k < target.size(); ++k) {
        const double u = (target.tau(k) - mode.grid.tau0()) / mode.grid.dtau();
        if (u < -1e-12 || u > n - 1 + 1e-12) {
            out(k) = 0;
            continue;
        }
        const int i = std::clamp(static_cast<int>(std::floor(u)), 0, n - 2);
        const double f = std::clamp(u - i, 0.0, 1.0);
        out(k) = (1 - f) * mode.samples(i) + f * mode.samples(i + 1);
    }
    return FieldMode(target, std::move(out));
}

} // namespace qmem
