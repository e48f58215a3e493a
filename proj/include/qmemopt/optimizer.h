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

#ifndef QMEMOPT_OPTIMIZER_H
#define QMEMOPT_OPTIMIZER_H

#include "qmemopt/core.h"
#include "qmemopt/simulator.h"

#include <memory>
#include <vector>

namespace qmem {

// A linear storage/retrieval model of the medium.
class MemoryModel
{
public:
    virtual ~MemoryModel() = default;

    // Output at zeta = 1 for a spin wave in the retrieval frame.
    virtual FieldMode retrieve(const SpinWave &s, const ControlField &ctrl) const = 0;

    // S(zeta, T) in the storage frame; input and control share a grid.
    virtual SpinWave store(const FieldMode &input, const ControlField &ctrl) const = 0;

    virtual const MediumParams &params() const = 0;
};

// Closed-form adiabatic maps on a Gauss-Legendre grid. The propagator
// matrix of the last few controls is cached, so an instance must not be
// shared between threads.
class AdiabaticModel : public MemoryModel
{
public:
    explicit AdiabaticModel(const MediumParams &params, int nodes = 0);

    FieldMode retrieve(const SpinWave &s, const ControlField &ctrl) const override;
    SpinWave store(const FieldMode &input, const ControlField &ctrl) const override;
    const MediumParams &params() const override { return m_params; }
    const SpaceGrid &grid() const { return m_grid; }

private:
    struct Entry
    {
        TimeGrid grid;
        Eigen::VectorXd h;
        Eigen::MatrixXcd G; // G(k, j) = propagator(sqrt(d zeta_j), sqrt(h_k))
    };

    const Eigen::MatrixXcd &propagators(const TimeGrid &grid, const Eigen::VectorXd &h) const;

    MediumParams m_params;
    SpaceGrid m_grid;
    mutable std::vector<Entry> m_cache;
};

// Full equations of motion; the retrieval output excludes the tail emitted
// after the control window.
class SimulatorModel : public MemoryModel
{
public:
    explicit SimulatorModel(const MediumParams &params, SimulationOptions opts = {});

    FieldMode retrieve(const SpinWave &s, const ControlField &ctrl) const override;
    SpinWave store(const FieldMode &input, const ControlField &ctrl) const override;
    const MediumParams &params() const override { return m_params; }

private:
    MediumParams m_params;
    SimulationOptions m_opts;
};

enum class Backend { closed_form, simulator };

std::unique_ptr<MemoryModel> make_model(Backend backend, const MediumParams &params,
                                        const SimulationOptions &opts = {});

struct IterationOptions
{
    double tol = 1e-4;      // L2 change of the normalised mode
    double eff_tol = 1e-7;  // absolute change of the efficiency
    int max_iter = 500;
    Backend backend = Backend::closed_form;
    SimulationOptions simulation;
};

struct IterationTrace
{
    // Efficiency of each iterate, before renormalisation. Nondecreasing.
    std::vector<double> efficiencies;
    // Storage efficiency of each time-reversed output (retrieval iteration
    // only); interleaves with `efficiencies`.
    std::vector<double> storage_efficiencies;
    std::vector<double> mode_changes;
    SpinWave final_spin_wave; // retrieval iteration: retrieval frame
    FieldMode final_input;    // storage + retrieval iteration
    int iterations = 0;
    bool converged = false;

    double final_efficiency() const { return efficiencies.empty() ? 0.0 : efficiencies.back(); }
};

// Retrieve, time reverse, store with the time-reversed control, renormalise.
// init is in the retrieval frame; ctrl should complete the retrieval.
IterationTrace iterate_retrieval(const MediumParams &params, const ControlField &ctrl,
                                 const SpinWave &init, const IterationOptions &opts = {});

// Same iteration on a caller-supplied model.
IterationTrace iterate_retrieval(const MemoryModel &model, const ControlField &ctrl,
                                 const SpinWave &init, const IterationOptions &opts = {});

// Storage followed by retrieval: retrieve(D store(e, ctrl_s), ctrl_r) with
// D = flip for backward retrieval and identity for forward.
FieldMode storage_retrieval_map(const MemoryModel &model, const FieldMode &input,
                                const ControlField &storage_ctrl,
                                const ControlField &retrieval_ctrl, Direction direction);

struct StorageRetrievalResult
{
    ControlField storage_control;   // shaped for the given input
    ControlField retrieval_control;
    // Control pair used during the iteration over input modes.
    ControlField iteration_storage_control;
    IterationTrace trace;
    double eta_max = 0;   // converged efficiency of the iteration
    double eta_input = 0; // the given input with the shaped controls
    SpinWave stored_mode; // storage frame, unit norm
};

// Power iteration of the composite map and its time-reversed adjoint over
// input modes, starting from `input`; then shapes a storage control that
// puts the given input into the optimal stored mode.
StorageRetrievalResult optimize_storage_retrieval(const MediumParams &params,
                                                  const FieldMode &input, Direction direction,
                                                  const IterationOptions &opts = {});

// A smooth control of total energy h on grid: constant with sin^2 ramps
// over the first and last ramp_fraction of the window.
ControlField completing_control(const TimeGrid &grid, double h, double ramp_fraction = 0.05);

} // namespace qmem

#endif // QMEMOPT_OPTIMIZER_H
