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

#ifndef QMEMOPT_CORE_H
#define QMEMOPT_CORE_H

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qmem {

using Complex = std::complex<double>;

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Optical depth d and detuning delta = Delta/gamma. Everything else is
// absorbed by the rescaling documented in nondimensionalize_doc().
struct MediumParams
{
    double d = 1.0;
    double delta = 0.0;

    MediumParams() = default;
    MediumParams(double d_, double delta_ = 0.0);
};

class TimeGrid
{
public:
    TimeGrid() = default;
    TimeGrid(double tau0, double dtau, int n);

    // n samples spanning [tau0, tau0 + duration].
    static TimeGrid span(double tau0, double duration, int n);

    double tau0() const { return m_tau0; }
    double dtau() const { return m_dtau; }
    int size() const { return m_n; }
    double tau(int k) const { return m_tau0 + k * m_dtau; }
    double duration() const { return (m_n - 1) * m_dtau; }
    double end() const { return tau(m_n - 1); }

    // Trapezoid weights.
    Eigen::VectorXd weights() const;

    bool operator==(const TimeGrid &other) const;

private:
    double m_tau0 = 0;
    double m_dtau = 1;
    int m_n = 2;
};

enum class SpaceGridKind {
    gauss_legendre,
    // Cell centres (j + 1/2)/n with equal weights 1/n; used by the simulator.
    midpoint,
    custom
};

class SpaceGrid
{
public:
    SpaceGrid() = default;
    SpaceGrid(Eigen::VectorXd nodes, Eigen::VectorXd weights,
              SpaceGridKind kind = SpaceGridKind::custom);

    static SpaceGrid gauss_legendre(int n);
    static SpaceGrid midpoint(int n);

    const Eigen::VectorXd &nodes() const { return m_nodes; }
    const Eigen::VectorXd &weights() const { return m_weights; }
    int size() const { return static_cast<int>(m_nodes.size()); }
    SpaceGridKind kind() const { return m_kind; }

    // Invariant under zeta -> 1 - zeta (nodes and weights).
    bool is_symmetric(double tol = 1e-12) const;

    bool operator==(const SpaceGrid &other) const;

private:
    Eigen::VectorXd m_nodes;
    Eigen::VectorXd m_weights;
    SpaceGridKind m_kind = SpaceGridKind::custom;
};

// Field envelope on a time grid; |samples|^2 integrates to photon number.
struct FieldMode
{
    TimeGrid grid;
    Eigen::VectorXcd samples;

    FieldMode() = default;
    FieldMode(TimeGrid g, Eigen::VectorXcd s);
    static FieldMode zero(const TimeGrid &g);
};

// Control Rabi frequency omega = Omega/gamma.
struct ControlField
{
    TimeGrid grid;
    Eigen::VectorXcd samples;

    ControlField() = default;
    ControlField(TimeGrid g, Eigen::VectorXcd s);
    static ControlField constant(const TimeGrid &g, Complex omega);
};

struct SpinWave
{
    SpaceGrid grid;
    Eigen::VectorXcd samples;

    SpinWave() = default;
    SpinWave(SpaceGrid g, Eigen::VectorXcd s);
    static SpinWave constant(const SpaceGrid &g, Complex value);
};

// Fractions relative to the initial excitation of the run.
struct EfficiencyBreakdown
{
    double eta_storage = 0;
    double eta_retrieval = 0;
    double eta_total = 0;
    double leak_fraction = 0;
    double decay_fraction = 0;
    // Excitation still in the medium (S, and P if not drained) at the end of
    // a retrieval run. Zero for storage runs, where S is the stored result.
    double residual_fraction = 0;
};

std::string nondimensionalize_doc();

double mode_norm2(const FieldMode &mode);
double control_energy(const ControlField &ctrl);
double spinwave_norm2(const SpinWave &s);

// Weighted inner products <a, b> (conjugate-linear in a).
Complex inner(const FieldMode &a, const FieldMode &b);
Complex inner(const SpinWave &a, const SpinWave &b);

SpinWave flip(const SpinWave &s);
FieldMode time_reverse(const FieldMode &mode);
ControlField time_reverse(const ControlField &ctrl);
SpinWave conj(const SpinWave &s);

FieldMode normalized(const FieldMode &mode);
SpinWave normalized(const SpinWave &s);

FieldMode operator*(Complex a, const FieldMode &m);
SpinWave operator*(Complex a, const SpinWave &s);

// L2 distance after removing the relative global phase.
double phase_aligned_distance(const SpinWave &a, const SpinWave &b);
double phase_aligned_distance(const FieldMode &a, const FieldMode &b);

// Resampling onto another spatial grid: barycentric Lagrange interpolation
// from Gauss-Legendre grids, local cubic interpolation otherwise.
SpinWave resample(const SpinWave &s, const SpaceGrid &target);

// Piecewise-linear resampling onto another time grid; zero outside.
FieldMode resample(const FieldMode &mode, const TimeGrid &target);

} // namespace qmem

#endif // QMEMOPT_CORE_H
