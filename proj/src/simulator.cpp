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

#include "qmemopt/simulator.h"
#include "qmemopt/fast.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace qmem {

EnsembleState::EnsembleState(SpaceGrid g, double tau0) :
    grid(std::move(g)),
    E(Eigen::VectorXcd::Zero(grid.size())),
    P(Eigen::VectorXcd::Zero(grid.size())),
    S(Eigen::VectorXcd::Zero(grid.size())),
    tau(tau0)
{
}

double EnsembleState::p_norm2() const
{
    return grid.weights().dot(P.cwiseAbs2());
}

double EnsembleState::s_norm2() const
{
    return grid.weights().dot(S.cwiseAbs2());
}

double EnsembleState::excitation() const
{
    return p_norm2() + s_norm2();
}

namespace {

// Coherences plus the three running energy integrals, all advanced by the
// same RK4 step so that the balance defect is pure time-stepping error.
struct Fields
{
    std::vector<Complex> P, S;
    double in = 0, out = 0, decay = 0;
};

class Integrator
{
public:
    Integrator(const MediumParams &params, int n, bool damping) :
        m_n(n),
        m_dz(1.0 / n),
        m_sqrt_d(std::sqrt(params.d)),
        m_loss(damping ? Complex(1.0, params.delta) : Complex(0.0, params.delta)),
        m_damping(damping ? 1.0 : 0.0),
        m_k(4),
        m_tmp{std::vector<Complex>(n), std::vector<Complex>(n), 0, 0, 0}
    {
        for (auto &k : m_k) {
            k.P.resize(n);
            k.S.resize(n);
        }
    }

    // Field at zeta = 1 for the given state and input value; optionally fills
    // the cell-centred field.
    Complex sweep(const Fields &f, Complex e_in, Eigen::VectorXcd *centres = nullptr) const
    {
        const Complex c(0.0, m_sqrt_d * m_dz);
        Complex e = e_in;
        for (int j = 0; j < m_n; ++j) {
            const Complex step = c * f.P[j];
            if (centres) {
                (*centres)(j) = e + 0.5 * step;
            }
            e += step;
        }
        return e;
    }

    void rhs(const Fields &f, Complex e_in, Complex w, Fields &df) const
    {
        const Complex c(0.0, m_sqrt_d * m_dz);
        const Complex iw(0.0, 1.0);
        const Complex iw_p = iw * w;
        const Complex iw_s = iw * std::conj(w);
        Complex e = e_in;
        double p2 = 0;
        for (int j = 0; j < m_n; ++j) {
            const Complex p = f.P[j];
            const Complex step = c * p;
            const Complex ec = e + 0.5 * step;
            e += step;
            df.P[j] = -m_loss * p + Complex(0.0, m_sqrt_d) * ec + iw_p * f.S[j];
            df.S[j] = iw_s * p;
            p2 += std::norm(p);
        }
        df.in = std::norm(e_in);
        df.out = std::norm(e);
        df.decay = 2.0 * m_damping * m_dz * p2;
    }

    // One classical RK4 step; e and w at t, t + h/2, t + h.
    void step(Fields &f, double h, const Complex e[3], const Complex w[3])
    {
        rhs(f, e[0], w[0], m_k[0]);
        axpy(f, 0.5 * h, m_k[0], m_tmp);
        rhs(m_tmp, e[1], w[1], m_k[1]);
        axpy(f, 0.5 * h, m_k[1], m_tmp);
        rhs(m_tmp, e[1], w[1], m_k[2]);
        axpy(f, h, m_k[2], m_tmp);
        rhs(m_tmp, e[2], w[2], m_k[3]);
        const double h6 = h / 6.0;
        for (int j = 0; j < m_n; ++j) {
            f.P[j] += h6 * (m_k[0].P[j] + 2.0 * (m_k[1].P[j] + m_k[2].P[j]) + m_k[3].P[j]);
            f.S[j] += h6 * (m_k[0].S[j] + 2.0 * (m_k[1].S[j] + m_k[2].S[j]) + m_k[3].S[j]);
        }
        f.in += h6 * (m_k[0].in + 2.0 * (m_k[1].in + m_k[2].in) + m_k[3].in);
        f.out += h6 * (m_k[0].out + 2.0 * (m_k[1].out + m_k[2].out) + m_k[3].out);
        f.decay += h6 * (m_k[0].decay + 2.0 * (m_k[1].decay + m_k[2].decay) + m_k[3].decay);
    }

    double dz() const { return m_dz; }

private:
    static void axpy(const Fields &f, double h, const Fields &k, Fields &out)
    {
        for (std::size_t j = 0; j < f.P.size(); ++j) {
            out.P[j] = f.P[j] + h * k.P[j];
            out.S[j] = f.S[j] + h * k.S[j];
        }
    }

    int m_n;
    double m_dz;
    double m_sqrt_d;
    Complex m_loss;
    double m_damping;
    std::vector<Fields> m_k;
    Fields m_tmp;
};

// Control between samples: magnitude linear, phase along the shorter arc.
Complex interp_polar(Complex a, Complex b, double f)
{
    const double ma = std::abs(a), mb = std::abs(b);
    const double mag = (1 - f) * ma + f * mb;
    if (mag == 0) {
        return 0;
    }
    if (ma == 0) {
        return std::polar(mag, std::arg(b));
    }
    if (mb == 0) {
        return std::polar(mag, std::arg(a));
    }
    const double pa = std::arg(a);
    const double dp = std::remainder(std::arg(b) - pa, 2 * std::numbers::pi);
    return std::polar(mag, pa + f * dp);
}

double base_step(const MediumParams &params, const SimulationOptions &opts)
{
    if (opts.dtau_max > 0) {
        return opts.dtau_max;
    }
    return std::min(0.05, 0.25 / (1.0 + std::abs(params.delta) + params.d));
}

struct RunSpec
{
    const TimeGrid *grid = nullptr;       // drive window; null for drain only
    const Eigen::VectorXcd *input = nullptr;
    const Eigen::VectorXcd *omega = nullptr;
    bool drain = false;
};

struct RunOutcome
{
    Fields fields;
    Eigen::VectorXcd output;
    double tail = 0;
    double tau_end = 0;
    long steps = 0;
};

void check_energy(const Fields &f, double initial, double dz)
{
    double exc = 0;
    for (std::size_t j = 0; j < f.P.size(); ++j) {
        exc += std::norm(f.P[j]) + std::norm(f.S[j]);
    }
    exc *= dz;
    const double total = exc + f.out + f.decay;
    if (!std::isfinite(total) || total > initial + f.in + 1e-6) {
        throw InstabilityError("simulator: energy grew beyond the input (step-size instability); "
                               "use a smaller dtau");
    }
}

RunOutcome run(Fields f, const RunSpec &spec, const MediumParams &params,
               const SimulationOptions &opts, double dt_max, double tau0)
{
    Integrator integ(params, static_cast<int>(f.P.size()), opts.polarization_decay);
    const double initial = integ.dz() * [&] {
        double s = 0;
        for (std::size_t j = 0; j < f.P.size(); ++j) {
            s += std::norm(f.P[j]) + std::norm(f.S[j]);
        }
        return s;
    }();
    RunOutcome res;
    double tau = tau0;
    if (spec.grid) {
        const TimeGrid &g = *spec.grid;
        const int nt = g.size();
        const Eigen::VectorXcd &ein = *spec.input;
        const Eigen::VectorXcd &om = *spec.omega;
        res.output.resize(nt);
        res.output(0) = integ.sweep(f, ein(0));
        const double dt = g.dtau();
        for (int k = 0; k + 1 < nt; ++k) {
            const double wmax = std::max(std::abs(om(k)), std::abs(om(k + 1)));
            const double lim = std::min(dt_max, 0.25 / std::max(wmax, 1e-300));
            const int m = std::max(1, static_cast<int>(std::ceil(dt / lim - 1e-9)));
            const double h = dt / m;
            for (int i = 0; i < m; ++i) {
                const double fr[3] = {double(i) / m, (i + 0.5) / m, double(i + 1) / m};
                Complex e[3], w[3];
                for (int q = 0; q < 3; ++q) {
                    e[q] = (1 - fr[q]) * ein(k) + fr[q] * ein(k + 1);
                    w[q] = interp_polar(om(k), om(k + 1), fr[q]);
                }
                integ.step(f, h, e, w);
                ++res.steps;
            }
            res.output(k + 1) = integ.sweep(f, ein(k + 1));
            check_energy(f, initial, integ.dz());
        }
        tau = g.end();
    }
    if (spec.drain) {
        // omega = 0: S is frozen and P empties through emission and decay.
        const double out_before = f.out;
        const Complex zero[3] = {0.0, 0.0, 0.0};
        const double scale = std::max(initial + f.in, 1e-300);
        const double h = dt_max;
        const double tau_stop = tau + 200.0;
        int since_check = 0;
        while (tau < tau_stop) {
            double p2 = 0;
            for (const Complex &p : f.P) {
                p2 += std::norm(p);
            }
            if (p2 * integ.dz() <= 1e-15 * scale) {
                break;
            }
            integ.step(f, h, zero, zero);
            tau += h;
            ++res.steps;
            if (++since_check == 64) {
                check_energy(f, initial, integ.dz());
                since_check = 0;
            }
        }
        check_energy(f, initial, integ.dz());
        res.tail = f.out - out_before;
    }
    res.tau_end = tau;
    res.fields = std::move(f);
    return res;
}

int checked_nodes(const SimulationOptions &opts)
{
    if (opts.n_zeta < 64) {
        throw Error("simulator: n_zeta must be at least 64");
    }
    return opts.n_zeta;
}

Fields to_fields(const SpinWave &s)
{
    Fields f;
    const Eigen::Index n = s.samples.size();
    f.P.assign(n, Complex(0.0));
    f.S.assign(s.samples.data(), s.samples.data() + n);
    return f;
}

EnsembleState to_state(const Fields &f, const SpaceGrid &grid, double tau, const MediumParams &params)
{
    EnsembleState st(grid, tau);
    for (int j = 0; j < grid.size(); ++j) {
        st.P(j) = f.P[j];
        st.S(j) = f.S[j];
    }
    // Cell-centred field with no input (the drive window has closed).
    const Complex c(0.0, std::sqrt(params.d) / grid.size());
    Complex e = 0;
    for (int j = 0; j < grid.size(); ++j) {
        st.E(j) = e + 0.5 * c * st.P(j);
        e += c * st.P(j);
    }
    return st;
}

// Runs with step refinement until the balance defect meets the tolerance.
template <typename Fn>
SimulationResult refine(const MediumParams &params, const SimulationOptions &opts, Fn &&attempt)
{
    double dt = base_step(params, opts);
    for (int r = 0;; ++r) {
        SimulationResult res;
        bool unstable = false;
        try {
            res = attempt(dt);
        } catch (const InstabilityError &) {
            if (!opts.auto_refine || r >= opts.max_refinements) {
                throw;
            }
            unstable = true;
        }
        if (!unstable) {
            res.diagnostics.refinements = r;
            res.diagnostics.dtau_max = dt;
            const double defect = energy_audit(res).defect;
            if (!opts.auto_refine || defect < opts.audit_tol) {
                return res;
            }
            if (r >= opts.max_refinements) {
                throw Error("simulator: energy audit defect " + std::to_string(defect)
                            + " above tolerance after step refinement; use a smaller dtau");
            }
        }
        dt *= 0.5;
    }
}

void fill_diagnostics(SimulationResult &res, const RunOutcome &o, double initial)
{
    auto &dg = res.diagnostics;
    dg.steps += o.steps;
    dg.input_energy = o.fields.in;
    dg.initial_excitation = initial;
    dg.output_energy = o.fields.out;
    dg.tail_output = o.tail;
    dg.decay_energy = o.fields.decay;
    dg.final_s = res.final_state.s_norm2();
    dg.final_p = res.final_state.p_norm2();
}

SimulationResult retrieval_run(const SpinWave &start, const ControlField &ctrl,
                               const MediumParams &params, const SimulationOptions &opts)
{
    const SpaceGrid grid = SpaceGrid::midpoint(checked_nodes(opts));
    const SpinWave s = resample(start, grid);
    const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(ctrl.grid.size());
    return refine(params, opts, [&](double dt) {
        Fields f = to_fields(s);
        const double initial = spinwave_norm2(s);
        RunSpec spec{&ctrl.grid, &zero, &ctrl.samples, opts.drain && opts.polarization_decay};
        RunOutcome o = run(std::move(f), spec, params, opts, dt, ctrl.grid.tau0());
        SimulationResult res;
        res.final_state = to_state(o.fields, grid, o.tau_end, params);
        res.output_mode = FieldMode(ctrl.grid, o.output);
        fill_diagnostics(res, o, initial);
        if (initial > 0) {
            auto &b = res.breakdown;
            b.eta_retrieval = o.fields.out / initial;
            b.eta_total = b.eta_retrieval;
            b.decay_fraction = o.fields.decay / initial;
            b.residual_fraction = res.final_state.excitation() / initial;
        }
        return res;
    });
}

} // namespace

SimulationResult simulate_storage(const FieldMode &input, const ControlField &ctrl,
                                  const MediumParams &params, const SimulationOptions &opts)
{
    if (!(input.grid == ctrl.grid)) {
        throw Error("simulate_storage: input and control must share a time grid");
    }
    const SpaceGrid grid = SpaceGrid::midpoint(checked_nodes(opts));
    return refine(params, opts, [&](double dt) {
        Fields f = to_fields(SpinWave::constant(grid, 0.0));
        RunSpec spec{&input.grid, &input.samples, &ctrl.samples, false};
        RunOutcome o = run(std::move(f), spec, params, opts, dt, input.grid.tau0());
        // Whatever is still in P leaks out after the window; S is kept.
        const double out_window = o.fields.out;
        if (opts.drain && opts.polarization_decay) {
            RunSpec tail{nullptr, nullptr, nullptr, true};
            const long steps = o.steps;
            Eigen::VectorXcd out = std::move(o.output);
            o = run(std::move(o.fields), tail, params, opts, dt, o.tau_end);
            o.steps += steps;
            o.output = std::move(out);
        }
        SimulationResult res;
        res.final_state = to_state(o.fields, grid, o.tau_end, params);
        res.output_mode = FieldMode(input.grid, o.output);
        fill_diagnostics(res, o, 0.0);
        res.diagnostics.tail_output = o.fields.out - out_window;
        const double in = o.fields.in;
        if (in > 0) {
            auto &b = res.breakdown;
            b.eta_storage = res.final_state.s_norm2() / in;
            b.eta_total = b.eta_storage;
            b.leak_fraction = o.fields.out / in;
            b.decay_fraction = o.fields.decay / in;
            b.residual_fraction = res.final_state.p_norm2() / in;
        }
        return res;
    });
}

SimulationResult simulate_retrieval(const SpinWave &s, const ControlField &ctrl,
                                    const MediumParams &params, Direction direction,
                                    const SimulationOptions &opts)
{
    return retrieval_run(direction == Direction::backward ? flip(s) : s, ctrl, params, opts);
}

SimulationResult simulate_fast_storage(const FieldMode &input, const MediumParams &params,
                                       const SimulationOptions &opts)
{
    if (params.delta != 0) {
        throw Error("simulate_fast_storage: fast storage requires delta = 0");
    }
    const ControlField off = ControlField::constant(input.grid, 0.0);
    SimulationOptions window = opts;
    window.drain = false;
    SimulationResult res = simulate_storage(input, off, params, window);
    if (opts.pi_pulse_strength > 0) {
        res.final_state = evolve_pulse(res.final_state, opts.pi_pulse_strength,
                                       0.5 * std::numbers::pi / opts.pi_pulse_strength, params);
    } else {
        res.final_state = pi_pulse(res.final_state);
    }
    // Optical excitation not swapped into S is lost; book it as decay so the
    // balance still closes.
    const double in = res.diagnostics.input_energy;
    const double lost = res.final_state.p_norm2();
    res.final_state.P.setZero();
    res.final_state.E.setZero();
    res.diagnostics.decay_energy += lost;
    res.diagnostics.final_s = res.final_state.s_norm2();
    res.diagnostics.final_p = 0;
    if (in > 0) {
        auto &b = res.breakdown;
        b.eta_storage = res.final_state.s_norm2() / in;
        b.eta_total = b.eta_storage;
        b.decay_fraction = res.diagnostics.decay_energy / in;
        b.residual_fraction = 0;
    }
    return res;
}

SimulationResult simulate_fast_retrieval(const SpinWave &s, const TimeGrid &grid,
                                         const MediumParams &params, const SimulationOptions &opts)
{
    // After the ideal pulse P = i s and S = 0; the swap is folded into the
    // initial state of a control-free run.
    const SpaceGrid sg = SpaceGrid::midpoint(checked_nodes(opts));
    const SpinWave sr = resample(s, sg);
    const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(grid.size());
    SimulationOptions o2 = opts;
    return refine(params, o2, [&](double dt) {
        Fields f;
        f.S.assign(sg.size(), Complex(0.0));
        f.P.resize(sg.size());
        for (int j = 0; j < sg.size(); ++j) {
            f.P[j] = Complex(0.0, 1.0) * sr.samples(j);
        }
        const double initial = spinwave_norm2(sr);
        RunSpec spec{&grid, &zero, &zero, opts.drain && opts.polarization_decay};
        RunOutcome o = run(std::move(f), spec, params, o2, dt, grid.tau0());
        SimulationResult res;
        res.final_state = to_state(o.fields, sg, o.tau_end, params);
        res.output_mode = FieldMode(grid, o.output);
        fill_diagnostics(res, o, initial);
        if (initial > 0) {
            auto &b = res.breakdown;
            b.eta_retrieval = o.fields.out / initial;
            b.eta_total = b.eta_retrieval;
            b.decay_fraction = o.fields.decay / initial;
            b.residual_fraction = res.final_state.excitation() / initial;
        }
        return res;
    });
}

EnsembleState evolve_pulse(const EnsembleState &state, double omega, double tau_pulse,
                           const MediumParams &params, int steps)
{
    if (!(tau_pulse >= 0) || !std::isfinite(omega)) {
        throw Error("evolve_pulse: invalid pulse");
    }
    if (state.grid.kind() != SpaceGridKind::midpoint) {
        throw Error("evolve_pulse: state must live on a midpoint grid");
    }
    const double rate = std::abs(omega) + 1.0 + std::abs(params.delta) + params.d;
    const int m = steps > 0 ? steps : std::max(16, static_cast<int>(std::ceil(tau_pulse * rate / 0.1)));
    Fields f;
    f.P.assign(state.P.data(), state.P.data() + state.P.size());
    f.S.assign(state.S.data(), state.S.data() + state.S.size());
    Integrator integ(params, state.grid.size(), true);
    const double h = tau_pulse / m;
    const Complex e[3] = {0.0, 0.0, 0.0};
    const Complex w[3] = {omega, omega, omega};
    for (int i = 0; i < m; ++i) {
        integ.step(f, h, e, w);
    }
    return to_state(f, state.grid, state.tau + tau_pulse, params);
}

AuditReport energy_audit(const SimulationResult &result)
{
    const auto &dg = result.diagnostics;
    AuditReport r;
    r.input = dg.input_energy;
    r.initial = dg.initial_excitation;
    r.final_excitation = dg.final_s + dg.final_p;
    r.output = dg.output_energy;
    r.decay = dg.decay_energy;
    const double total = r.input + r.initial;
    const double miss = std::abs(total - r.final_excitation - r.output - r.decay);
    r.defect = total > 0 ? miss / total : miss;
    return r;
}

} // namespace qmem
