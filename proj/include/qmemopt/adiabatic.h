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

#ifndef QMEMOPT_ADIABATIC_H
#define QMEMOPT_ADIABATIC_H

#include "qmemopt/core.h"

#include <vector>

namespace qmem {

// h(tau) = integral_0^tau |omega|^2 (cumulative trapezoid).
struct DecayFunction
{
    TimeGrid grid;
    Eigen::VectorXd h;
};

DecayFunction decay_function(const ControlField &ctrl);

// exp(-a (q^2 + u^2)) I0(2 a q u), evaluated without overflow.
Complex adiabatic_propagator(Complex a, double q, double u);

// The spin-wave integral of the adiabatic retrieval formula,
//   B(h) = a sum_j w_j exp(-a (d zeta_j + h)) I0(2 a sqrt(d zeta_j h)) s(1 - zeta_j),
// with a = 1/(1 + i delta), so that E_out(tau) = -sqrt(d) omega(tau) B(h(tau)).
class AdiabaticBracket
{
public:
    AdiabaticBracket(const SpinWave &s, const MediumParams &params);

    Complex operator()(double h) const;

private:
    MediumParams m_params;
    Complex m_a;
    Eigen::VectorXd m_sqrt_dzeta;
    Eigen::VectorXcd m_weighted; // w_j s(1 - zeta_j)
};

struct AdiabaticOutput
{
    FieldMode output;
    double h_final = 0;
    // False when T_out d < 10: the closed form is outside its regime.
    bool adiabatic_ok = true;
};

// Retrieval of a spin wave given in the retrieval frame (forward
// propagation from zeta = 0 to the output at zeta = 1).
AdiabaticOutput retrieve_adiabatic(const SpinWave &s, const ControlField &ctrl,
                                   const MediumParams &params);

// Adiabatic storage of an input mode, returning S(zeta, T) on the given
// grid in the storage frame. This is the adjoint of retrieve_adiabatic
// under time reversal, written out explicitly:
//   S(zeta) = -sqrt(d) int dt conj(omega(t)) a exp(-a (d zeta + h_T(t)))
//             I0(2 a sqrt(d zeta h_T(t))) E_in(t),   h_T(t) = int_t^T |omega|^2.
SpinWave store_adiabatic(const FieldMode &input, const ControlField &ctrl,
                         const MediumParams &params, const SpaceGrid &grid);

// Control energy needed to empty the medium to ~exp(-40).
double default_h_max(const MediumParams &params);

struct ShapedControl
{
    ControlField control;
    DecayFunction h;
    double eta_r = 0;
    double h_max = 0;
    // Fraction of eta_r lost because h had to be capped at h_max.
    double truncation_loss = 0;
    bool truncated = false; // set when truncation_loss exceeds 1e-6
    bool adiabatic_ok = true;
};

// Finds the control that retrieves s (retrieval frame) into
// sqrt(eta_r) * target. h_max <= 0 selects default_h_max().
ShapedControl shape_retrieval_control(const SpinWave &s, const FieldMode &target,
                                      const MediumParams &params, double h_max = 0);

struct StorageControl
{
    ControlField control;
    double predicted_eta_s = 0;
    SpinWave optimal_mode;  // retrieval-frame optimum; stored wave is its flip
    ShapedControl retrieval; // the retrieval control whose time reverse is `control`
};

StorageControl optimal_storage_control(const FieldMode &input, const MediumParams &params,
                                       int kernel_nodes = 0, double h_max = 0);

} // namespace qmem

#endif // QMEMOPT_ADIABATIC_H
