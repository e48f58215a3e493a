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

#include "qmemopt/optimizer.h"
#include "qmemopt/adiabatic.h"
#include "qmemopt/kernel.h"

#include <cmath>
#include <numbers>

namespace qmem {

AdiabaticModel::AdiabaticModel(const MediumParams &params, int nodes) :
    m_params(params),
    m_grid(SpaceGrid::gauss_legendre(nodes > 0 ? nodes : default_kernel_nodes))
{
}

const Eigen::MatrixXcd &AdiabaticModel::propagators(const TimeGrid &grid,
                                                    const Eigen::VectorXd &h) const
{
    for (const Entry &e : m_cache) {
        if (e.grid == grid && e.h == h) {
            return e.G;
        }
    }
    if (m_cache.size() >= 4) {
        m_cache.erase(m_cache.begin());
    }
    const Complex a = 1.0 / Complex(1.0, m_params.delta);
    const Eigen::Index nt = h.size(), nz = m_grid.size();
    Eigen::MatrixXcd G(nt, nz);
    for (Eigen::Index j = 0; j < nz; ++j) {
        const double q = std::sqrt(m_params.d * m_grid.nodes()(j));
        for (Eigen::Index k = 0; k < nt; ++k) {
            G(k, j) = adiabatic_propagator(a, q, std::sqrt(std::max(h(k), 0.0)));
        }
    }
    m_cache.push_back({grid, h, std::move(G)});
    return m_cache.back().G;
}

FieldMode AdiabaticModel::retrieve(const SpinWave &s, const ControlField &ctrl) const
{
    // Same sums as retrieve_adiabatic, with the propagators reused.
    const Complex a = 1.0 / Complex(1.0, m_params.delta);
    const SpinWave r = flip(resample(s, m_grid));
    const Eigen::VectorXcd ws = (m_grid.weights().array() * r.samples.array()).matrix();
    const Eigen::VectorXcd b = a * (propagators(ctrl.grid, decay_function(ctrl).h) * ws);
    const double sqrt_d = std::sqrt(m_params.d);
    Eigen::VectorXcd out(ctrl.grid.size());
    for (int k = 0; k < ctrl.grid.size(); ++k) {
        const Complex w = ctrl.samples(k);
        out(k) = (w == Complex(0.0)) ? Complex(0.0) : -sqrt_d * w * b(k);
    }
    return FieldMode(ctrl.grid, std::move(out));
}

SpinWave AdiabaticModel::store(const FieldMode &input, const ControlField &ctrl) const
{
    if (!(input.grid == ctrl.grid)) {
        throw Error("AdiabaticModel::store: input and control must share a time grid");
    }
    // Remaining control energy at sample k is h of the reversed control at
    // nt - 1 - k, as in store_adiabatic.
    const ControlField rev = time_reverse(ctrl);
    const Eigen::MatrixXcd &G = propagators(rev.grid, decay_function(rev).h);
    const Complex a = 1.0 / Complex(1.0, m_params.delta);
    const double sqrt_d = std::sqrt(m_params.d);
    const Eigen::VectorXd tw = ctrl.grid.weights();
    const int nt = ctrl.grid.size();
    Eigen::VectorXcd drive(nt);
    for (int k = 0; k < nt; ++k) {
        drive(nt - 1 - k) = -sqrt_d * a * tw(k) * std::conj(ctrl.samples(k)) * input.samples(k);
    }
    Eigen::VectorXcd out = G.transpose() * drive;
    return SpinWave(m_grid, std::move(out));
}

SimulatorModel::SimulatorModel(const MediumParams &params, SimulationOptions opts) :
    m_params(params),
    m_opts(opts)
{
}

FieldMode SimulatorModel::retrieve(const SpinWave &s, const ControlField &ctrl) const
{
    return simulate_retrieval(s, ctrl, m_params, Direction::forward, m_opts).output_mode;
}

SpinWave SimulatorModel::store(const FieldMode &input, const ControlField &ctrl) const
{
    return simulate_storage(input, ctrl, m_params, m_opts).final_state.spin_wave();
}

std::unique_ptr<MemoryModel> make_model(Backend backend, const MediumParams &params,
                                        const SimulationOptions &opts)
{
    if (backend == Backend::simulator) {
        return std::make_unique<SimulatorModel>(params, opts);
    }
    return std::make_unique<AdiabaticModel>(params);
}

ControlField completing_control(const TimeGrid &grid, double h, double ramp_fraction)
{
    if (!(h > 0) || !(ramp_fraction >= 0 && ramp_fraction < 0.5)) {
        throw Error("completing_control: need h > 0 and ramp fraction in [0, 0.5)");
    }
    const double T = grid.duration();
    const double ramp = ramp_fraction * T;
    Eigen::VectorXcd w(grid.size());
    for (int k = 0; k < grid.size(); ++k) {
        const double t = grid.tau(k) - grid.tau0();
        const double edge = std::min(t, T - t);
        double f = 1.0;
        if (ramp > 0 && edge < ramp) {
            const double s = std::sin(0.5 * std::numbers::pi * edge / ramp);
            f = s * s;
        }
        w(k) = f;
    }
    const double e = grid.weights().dot(w.cwiseAbs2());
    if (!(e > 0)) {
        throw Error("completing_control: grid too coarse for the ramps");
    }
    return ControlField(grid, std::sqrt(h / e) * w);
}

IterationTrace iterate_retrieval(const MediumParams &params, const ControlField &ctrl,
                                 const SpinWave &init, const IterationOptions &opts)
{
    const auto model = make_model(opts.backend, params, opts.simulation);
    return iterate_retrieval(*model, ctrl, init, opts);
}

IterationTrace iterate_retrieval(const MemoryModel &model, const ControlField &ctrl,
                                 const SpinWave &init, const IterationOptions &opts)
{
    if (!(spinwave_norm2(init) > 0)) {
        throw Error("iterate_retrieval: initial spin wave is zero");
    }
    IterationTrace trace;
    const ControlField reversed = time_reverse(ctrl);
    SpinWave s = normalized(init);
    for (int it = 1; it <= opts.max_iter; ++it) {
        const FieldMode out = model.retrieve(s, ctrl);
        const double eta = mode_norm2(out);
        if (!(eta > 0)) {
            throw Error("iterate_retrieval: nothing retrieved; the control is too weak");
        }
        const SpinWave stored = model.store(time_reverse(out), reversed);
        const double eta_s = spinwave_norm2(stored) / eta;
        const SpinWave next = normalized(flip(stored));
        const double change = phase_aligned_distance(next, resample(s, next.grid));
        const bool steady = trace.efficiencies.empty()
            || std::abs(eta - trace.efficiencies.back()) < opts.eff_tol;
        trace.efficiencies.push_back(eta);
        trace.storage_efficiencies.push_back(eta_s);
        trace.mode_changes.push_back(change);
        trace.iterations = it;
        s = next;
        if (change < opts.tol && steady) {
            trace.converged = true;
            break;
        }
    }
    trace.final_spin_wave = s;
    return trace;
}

namespace {

SpinWave direct(const SpinWave &s, Direction direction)
{
    return direction == Direction::backward ? flip(s) : s;
}

} // namespace

FieldMode storage_retrieval_map(const MemoryModel &model, const FieldMode &input,
                                const ControlField &storage_ctrl,
                                const ControlField &retrieval_ctrl, Direction direction)
{
    return model.retrieve(direct(model.store(input, storage_ctrl), direction), retrieval_ctrl);
}

StorageRetrievalResult optimize_storage_retrieval(const MediumParams &params,
                                                  const FieldMode &input, Direction direction,
                                                  const IterationOptions &opts)
{
    if (!(mode_norm2(input) > 0)) {
        throw Error("optimize_storage_retrieval: input mode is zero");
    }
    const auto model = make_model(opts.backend, params, opts.simulation);
    const TimeGrid &grid = input.grid;
    const ControlField w_r = completing_control(grid, default_h_max(params));
    const ControlField w_s = time_reverse(w_r);
    const ControlField w_r_rev = time_reverse(w_r);
    const ControlField w_s_rev = time_reverse(w_s);

    StorageRetrievalResult result;
    result.retrieval_control = w_r;
    result.iteration_storage_control = w_s;
    IterationTrace &trace = result.trace;

    // Composite map and its adjoint, which is the same physical sequence run
    // on time-reversed fields with the roles of the two controls swapped.
    FieldMode e = normalized(input);
    for (int it = 1; it <= opts.max_iter; ++it) {
        const FieldMode out = storage_retrieval_map(*model, e, w_s, w_r, direction);
        const double eta = mode_norm2(out);
        if (!(eta > 0)) {
            throw Error("optimize_storage_retrieval: nothing retrieved");
        }
        const FieldMode back =
            time_reverse(storage_retrieval_map(*model, time_reverse(out), w_r_rev, w_s_rev, direction));
        const FieldMode next = normalized(back);
        const double change = phase_aligned_distance(next, e);
        const bool steady = trace.efficiencies.empty()
            || std::abs(eta - trace.efficiencies.back()) < opts.eff_tol;
        trace.efficiencies.push_back(eta);
        trace.mode_changes.push_back(change);
        trace.iterations = it;
        e = next;
        if (change < opts.tol && steady) {
            trace.converged = true;
            break;
        }
    }
    trace.final_input = e;
    result.eta_max = trace.final_efficiency();

    // Optimal stored wave, and the retrieval-frame wave whose time-reversed
    // readout stores the given input into it.
    result.stored_mode = normalized(model->store(e, w_s));
    const FieldMode probe = model->retrieve(direct(result.stored_mode, direction), w_r);
    SpinWave shaped_from = direct(model->store(time_reverse(probe), w_r_rev), direction);
    if (shaped_from.grid.kind() != SpaceGridKind::gauss_legendre) {
        shaped_from = resample(shaped_from, SpaceGrid::gauss_legendre(default_kernel_nodes));
    }
    const ShapedControl shaped =
        shape_retrieval_control(normalized(shaped_from), time_reverse(normalized(input)), params);
    result.storage_control = time_reverse(shaped.control);
    result.eta_input = mode_norm2(storage_retrieval_map(*model, normalized(input),
                                                        result.storage_control, w_r, direction));
    return result;
}

} // namespace qmem
