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

#ifndef QMEMOPT_SIMULATOR_H
#define QMEMOPT_SIMULATOR_H

#include "qmemopt/core.h"
#include "qmemopt/ensemble.h"

namespace qmem {

enum class Direction { forward, backward };

class InstabilityError : public Error
{
public:
    using Error::Error;
};

struct SimulationOptions
{
    int n_zeta = 256;
    // Largest RK4 step; <= 0 picks min(0.05, 0.25/(1 + |delta| + d)).
    // Steps are further subdivided so that |omega| dtau <= 0.25.
    double dtau_max = 0;
    // Halve the step until the energy-audit defect is below audit_tol.
    bool auto_refine = true;
    int max_refinements = 4;
    double audit_tol = 1e-4;
    // Let P relax (with omega = 0) after the drive window ends.
    bool drain = true;
    // Test hook: switch off the -P damping term.
    bool polarization_decay = true;
    // Fast storage: 0 applies the ideal instantaneous pi-pulse, otherwise a
    // real constant control of this strength and area pi/2.
    double pi_pulse_strength = 0;
};

struct SimulationDiagnostics
{
    long steps = 0;
    int refinements = 0;
    double dtau_max = 0;
    double input_energy = 0;
    double initial_excitation = 0;
    double output_energy = 0;  // includes the drain tail
    double tail_output = 0;
    double decay_energy = 0;   // 2 int dtau int dzeta |P|^2
    double final_s = 0;
    double final_p = 0;
};

struct SimulationResult
{
    EnsembleState final_state;
    FieldMode output_mode; // E(zeta = 1, tau) on the drive grid
    EfficiencyBreakdown breakdown;
    SimulationDiagnostics diagnostics;
};

// Storage: E(0, tau) = input, S(zeta, 0) = 0. input and ctrl share a grid.
SimulationResult simulate_storage(const FieldMode &input, const ControlField &ctrl,
                                  const MediumParams &params,
                                  const SimulationOptions &opts = {});

// Retrieval of a stored spin wave (storage frame). Backward retrieval
// flips it before reading out.
SimulationResult simulate_retrieval(const SpinWave &s, const ControlField &ctrl,
                                    const MediumParams &params, Direction direction,
                                    const SimulationOptions &opts = {});

// Resonant storage with omega = 0 while the input enters, then a pi-pulse
// at the end of the input window.
SimulationResult simulate_fast_storage(const FieldMode &input, const MediumParams &params,
                                       const SimulationOptions &opts = {});

// Retrieval by an instantaneous pi-pulse at tau0 followed by free evolution
// over `grid`. s is in the retrieval frame.
SimulationResult simulate_fast_retrieval(const SpinWave &s, const TimeGrid &grid,
                                         const MediumParams &params,
                                         const SimulationOptions &opts = {});

// Applies a finite control pulse of constant real strength omega and
// duration tau_pulse to a state, no input field.
EnsembleState evolve_pulse(const EnsembleState &state, double omega, double tau_pulse,
                           const MediumParams &params, int steps = 0);

struct AuditReport
{
    double input = 0;
    double initial = 0;
    double final_excitation = 0;
    double output = 0;
    double decay = 0;
    // |input + initial - final - output - decay| relative to input + initial.
    double defect = 0;
};

AuditReport energy_audit(const SimulationResult &result);

} // namespace qmem

#endif // QMEMOPT_SIMULATOR_H
