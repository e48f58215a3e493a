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

#include "qmemopt/cli.h"
#include "qmemopt/adiabatic.h"
#include "qmemopt/kernel.h"
#include "qmemopt/optimizer.h"
#include "qmemopt/reference.h"
#include "qmemopt/simulator.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace qmem::cli {

using json = nlohmann::json;

namespace {

constexpr const char *version = "1.0.0";

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        parts.push_back(trim(cur));
    }
    return parts;
}

double parse_double(const std::string &key, const std::string &text)
{
    const std::string t = trim(text);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw ConfigError("invalid number for '" + key + "': '" + text + "'");
    }
    return v;
}

long parse_long(const std::string &key, const std::string &text)
{
    const std::string t = trim(text);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError("invalid integer for '" + key + "': '" + text + "'");
    }
    return v;
}

double positive(const std::string &key, double v)
{
    if (!(v > 0)) {
        throw ConfigError("'" + key + "' must be positive");
    }
    return v;
}

int at_least(const std::string &key, long v, long lo)
{
    if (v < lo || v > std::numeric_limits<int>::max()) {
        throw ConfigError("'" + key + "' must be an integer >= " + std::to_string(lo));
    }
    return static_cast<int>(v);
}

std::string one_of(const std::string &key, const std::string &v,
                   std::initializer_list<const char *> allowed)
{
    for (const char *a : allowed) {
        if (v == a) {
            return v;
        }
    }
    std::string msg = "'" + key + "' must be one of:";
    for (const char *a : allowed) {
        msg += std::string(" ") + a;
    }
    throw ConfigError(msg);
}

std::vector<double> parse_d_list(const std::string &text)
{
    std::vector<double> ds;
    for (const std::string &part : split(text, ',')) {
        ds.push_back(positive("d", parse_double("d", part)));
    }
    if (ds.empty()) {
        throw ConfigError("'d' needs at least one value");
    }
    return ds;
}

} // namespace

const std::vector<std::string> &RunConfig::keys()
{
    static const std::vector<std::string> k = {
        "d", "delta", "T", "n_time", "kernel_nodes", "n_zeta", "dtau", "tol", "eff_tol",
        "kernel_tol", "max_iter", "jobs", "out", "input_center", "input_sigma", "d_min",
        "d_max", "d_points", "h_max", "backend", "direction", "mode", "control",
        "retrieval_control", "init", "seed"};
    return k;
}

void RunConfig::set(const std::string &key, const std::string &raw)
{
    const std::string value = trim(raw);
    if (key == "d") {
        d = parse_d_list(value);
    } else if (key == "delta") {
        delta = parse_double(key, value);
    } else if (key == "T") {
        T = positive(key, parse_double(key, value));
    } else if (key == "n_time") {
        n_time = at_least(key, parse_long(key, value), 3);
    } else if (key == "kernel_nodes") {
        kernel_nodes = at_least(key, parse_long(key, value), 2);
    } else if (key == "n_zeta") {
        n_zeta = at_least(key, parse_long(key, value), 64);
    } else if (key == "dtau") {
        dtau = parse_double(key, value);
        if (dtau < 0) {
            throw ConfigError("'dtau' must be >= 0 (0 selects the automatic step)");
        }
    } else if (key == "tol") {
        tol = positive(key, parse_double(key, value));
    } else if (key == "eff_tol") {
        eff_tol = positive(key, parse_double(key, value));
    } else if (key == "kernel_tol") {
        kernel_tol = positive(key, parse_double(key, value));
    } else if (key == "max_iter") {
        max_iter = at_least(key, parse_long(key, value), 1);
    } else if (key == "jobs") {
        jobs = at_least(key, parse_long(key, value), 1);
    } else if (key == "out") {
        if (value.empty()) {
            throw ConfigError("'out' must not be empty");
        }
        out = value;
    } else if (key == "input_center") {
        input_center = parse_double(key, value);
        if (!(input_center > 0 && input_center < 1)) {
            throw ConfigError("'input_center' must lie in (0, 1)");
        }
    } else if (key == "input_sigma") {
        input_sigma = positive(key, parse_double(key, value));
    } else if (key == "d_min") {
        d_min = positive(key, parse_double(key, value));
    } else if (key == "d_max") {
        d_max = positive(key, parse_double(key, value));
    } else if (key == "d_points") {
        d_points = at_least(key, parse_long(key, value), 1);
    } else if (key == "h_max") {
        h_max = parse_double(key, value);
        if (h_max < 0) {
            throw ConfigError("'h_max' must be >= 0 (0 selects the automatic value)");
        }
    } else if (key == "backend") {
        backend = one_of(key, value, {"closed_form", "simulator"});
    } else if (key == "direction") {
        direction = one_of(key, value, {"backward", "forward"});
    } else if (key == "mode") {
        mode = one_of(key, value, {"storage", "retrieval", "both"});
    } else if (key == "control") {
        control = value;
    } else if (key == "retrieval_control") {
        retrieval_control = value;
    } else if (key == "init") {
        init = one_of(key, value, {"uniform", "random"});
    } else if (key == "seed") {
        const long s = parse_long(key, value);
        if (s < 0) {
            throw ConfigError("'seed' must be non-negative");
        }
        seed = static_cast<unsigned long>(s);
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

void RunConfig::validate() const
{
    if (d_max < d_min) {
        throw ConfigError("'d_max' must not be below 'd_min'");
    }
    // Control specs are checked against a throwaway grid.
    const TimeGrid grid = TimeGrid::span(0.0, T, 3);
    for (const auto &[key, spec] : {std::pair{"control", control},
                                    std::pair{"retrieval_control", retrieval_control}}) {
        try {
            make_control(spec, grid, MediumParams(1.0, delta));
        } catch (const ConfigError &e) {
            throw ConfigError(std::string("'") + key + "': " + e.what());
        }
    }
}

void apply_config_text(RunConfig &cfg, const std::string &text, const std::string &origin)
{
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        const std::string where = origin + ":" + std::to_string(number) + ": ";
        if (eq == std::string::npos) {
            throw ConfigError(where + "expected 'key = value', got '" + body + "'");
        }
        const std::string key = trim(body.substr(0, eq));
        try {
            cfg.set(key, body.substr(eq + 1));
        } catch (const ConfigError &e) {
            throw ConfigError(where + e.what());
        }
    }
}

void apply_config_file(RunConfig &cfg, const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    apply_config_text(cfg, buf.str(), path);
}

std::vector<double> d_values(const RunConfig &cfg, const std::vector<double> &fallback)
{
    return cfg.d ? *cfg.d : fallback;
}

std::vector<double> default_sweep(const RunConfig &cfg)
{
    std::vector<double> ds;
    if (cfg.d_points == 1) {
        return {cfg.d_min};
    }
    const double a = std::log(cfg.d_min), b = std::log(cfg.d_max);
    for (int i = 0; i < cfg.d_points; ++i) {
        ds.push_back(std::exp(a + (b - a) * i / (cfg.d_points - 1)));
    }
    ds.front() = cfg.d_min;
    ds.back() = cfg.d_max;
    return ds;
}

ControlField make_control(const std::string &spec, const TimeGrid &grid, const MediumParams &params)
{
    const std::string s = trim(spec);
    if (s == "zero") {
        return ControlField::constant(grid, 0.0);
    }
    if (s == "square") {
        return ControlField::constant(grid, std::sqrt(params.d / grid.duration()));
    }
    if (s == "complete") {
        return completing_control(grid, default_h_max(params));
    }
    std::vector<std::pair<double, Complex>> pts;
    for (const std::string &item : split(s, ',')) {
        const std::vector<std::string> f = split(item, ':');
        if (f.size() < 2 || f.size() > 3) {
            throw ConfigError("control point '" + item + "' is not tau:re[:im]");
        }
        const double t = parse_double("control", f[0]);
        const Complex w(parse_double("control", f[1]), f.size() == 3 ? parse_double("control", f[2]) : 0.0);
        if (!pts.empty() && !(t > pts.back().first)) {
            throw ConfigError("control times must increase");
        }
        pts.emplace_back(t, w);
    }
    if (pts.size() < 2) {
        throw ConfigError("control needs 'square', 'zero', 'complete' or at least two tau:re[:im] points");
    }
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(grid.size());
    for (int k = 0; k < grid.size(); ++k) {
        const double t = grid.tau(k);
        if (t < pts.front().first || t > pts.back().first) {
            continue;
        }
        auto hi = std::upper_bound(pts.begin(), pts.end(), t,
                                   [](double x, const auto &p) { return x < p.first; });
        if (hi == pts.end()) {
            w(k) = pts.back().second;
            continue;
        }
        const auto lo = hi - 1;
        const double f = (t - lo->first) / (hi->first - lo->first);
        w(k) = (1 - f) * lo->second + f * hi->second;
    }
    return ControlField(grid, std::move(w));
}

std::string format_double(double x)
{
    if (std::isnan(x)) {
        return "nan";
    }
    if (x == 0) {
        x = 0.0; // no "-0" in tables
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

// ---- output helpers ----

std::string d_tag(double d)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", d);
    return buf;
}

std::filesystem::path out_dir(const RunConfig &cfg)
{
    const std::filesystem::path dir(cfg.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
    return dir;
}

void write_file(const std::filesystem::path &path, const std::string &content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    f << content;
    if (!f) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

class Csv
{
public:
    explicit Csv(const std::vector<std::string> &header)
    {
        row_strings(header);
    }

    void row(std::initializer_list<double> values)
    {
        std::string line;
        for (double v : values) {
            if (!line.empty()) {
                line += ',';
            }
            line += format_double(v);
        }
        m_text += line + '\n';
    }

    const std::string &text() const { return m_text; }

private:
    void row_strings(const std::vector<std::string> &values)
    {
        std::string line;
        for (const auto &v : values) {
            if (!line.empty()) {
                line += ',';
            }
            line += v;
        }
        m_text += line + '\n';
    }

    std::string m_text;
};

void write_json(const std::filesystem::path &path, const json &j)
{
    write_file(path, j.dump(2) + "\n");
}

json number(double x)
{
    return std::isfinite(x) ? json(x) : json(nullptr);
}

json config_json(const RunConfig &cfg)
{
    json p;
    p["d"] = cfg.d ? json(*cfg.d) : json(nullptr);
    p["delta"] = cfg.delta;
    p["T"] = cfg.T;
    p["n_time"] = cfg.n_time;
    p["kernel_nodes"] = cfg.kernel_nodes;
    p["n_zeta"] = cfg.n_zeta;
    p["dtau"] = cfg.dtau;
    p["max_iter"] = cfg.max_iter;
    p["d_min"] = cfg.d_min;
    p["d_max"] = cfg.d_max;
    p["d_points"] = cfg.d_points;
    p["h_max"] = cfg.h_max;
    p["backend"] = cfg.backend;
    p["direction"] = cfg.direction;
    p["mode"] = cfg.mode;
    p["control"] = cfg.control;
    p["retrieval_control"] = cfg.retrieval_control;
    p["init"] = cfg.init;
    p["seed"] = cfg.seed;
    return p;
}

json metadata(const RunConfig &cfg)
{
    json m;
    m["version"] = version;
    m["grids"] = {{"time", {{"tau0", 0.0}, {"duration", cfg.T}, {"n", cfg.n_time}}},
                  {"kernel", {{"kind", "gauss_legendre"}, {"nodes", cfg.kernel_nodes}}},
                  {"simulator", {{"kind", "midpoint"}, {"n_zeta", cfg.n_zeta}, {"dtau_max", cfg.dtau}}}};
    m["tolerances"] = {{"kernel", cfg.kernel_tol},
                       {"iteration_mode", cfg.tol},
                       {"iteration_efficiency", cfg.eff_tol},
                       {"audit", SimulationOptions{}.audit_tol}};
    m["reference_input"] = {{"shape", "gaussian, shifted to vanish at 0 and T, unit norm"},
                            {"center_fraction", cfg.input_center},
                            {"sigma_fraction", cfg.input_sigma},
                            {"T", cfg.T}};
    return m;
}

json envelope(const char *command, const RunConfig &cfg, json results)
{
    return {{"command", command},
            {"params", config_json(cfg)},
            {"results", std::move(results)},
            {"metadata", metadata(cfg)}};
}

// Runs fn(i) for i in [0, n) on `jobs` threads; results stay in index order.
template <typename Fn>
void parallel_for(int n, int jobs, Fn fn)
{
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

FieldMode reference_input(const RunConfig &cfg)
{
    return make_reference_input(cfg.T, TimeGrid::span(0.0, cfg.T, cfg.n_time),
                                ReferenceInputSpec{cfg.input_center, cfg.input_sigma});
}

SimulationOptions sim_options(const RunConfig &cfg)
{
    SimulationOptions o;
    o.n_zeta = cfg.n_zeta;
    o.dtau_max = cfg.dtau;
    return o;
}

IterationOptions iter_options(const RunConfig &cfg)
{
    IterationOptions o;
    o.tol = cfg.tol;
    o.eff_tol = cfg.eff_tol;
    o.max_iter = cfg.max_iter;
    o.backend = cfg.backend == "simulator" ? Backend::simulator : Backend::closed_form;
    o.simulation = sim_options(cfg);
    return o;
}

OptimalSpinWave optimum(const RunConfig &cfg, double d)
{
    return optimal_spin_wave(d, SpaceGrid::gauss_legendre(cfg.kernel_nodes), cfg.kernel_tol);
}

std::string field_csv(const FieldMode &m)
{
    Csv csv({"tau", "re_E", "im_E"});
    for (int k = 0; k < m.grid.size(); ++k) {
        csv.row({m.grid.tau(k), m.samples(k).real(), m.samples(k).imag()});
    }
    return csv.text();
}

std::string spinwave_csv(const SpinWave &s)
{
    Csv csv({"zeta", "re_S", "im_S"});
    for (int j = 0; j < s.grid.size(); ++j) {
        csv.row({s.grid.nodes()(j), s.samples(j).real(), s.samples(j).imag()});
    }
    return csv.text();
}

json breakdown_json(const EfficiencyBreakdown &b)
{
    return {{"eta_storage", b.eta_storage},
            {"eta_retrieval", b.eta_retrieval},
            {"eta_total", b.eta_total},
            {"leak_fraction", b.leak_fraction},
            {"decay_fraction", b.decay_fraction},
            {"residual_fraction", b.residual_fraction}};
}

json simulation_json(const SimulationResult &r)
{
    const AuditReport a = energy_audit(r);
    return {{"breakdown", breakdown_json(r.breakdown)},
            {"audit", {{"defect", a.defect},
                       {"input", a.input},
                       {"initial_excitation", a.initial},
                       {"final_excitation", a.final_excitation},
                       {"output", a.output},
                       {"decay", a.decay}}},
            {"diagnostics", {{"steps", r.diagnostics.steps},
                             {"refinements", r.diagnostics.refinements},
                             {"dtau_max", r.diagnostics.dtau_max},
                             {"tail_output", r.diagnostics.tail_output}}}};
}

// Smooth positive random spin wave: a few low cosines with random weights.
SpinWave random_smooth(const SpaceGrid &grid, unsigned long seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double c[4];
    for (double &x : c) {
        x = u(rng);
    }
    Eigen::VectorXcd v(grid.size());
    for (int j = 0; j < grid.size(); ++j) {
        const double z = grid.nodes()(j);
        double s = 1.5;
        for (int m = 0; m < 4; ++m) {
            s += 0.3 * c[m] * std::cos((m + 1) * std::numbers::pi * z);
        }
        v(j) = s;
    }
    return SpinWave(grid, std::move(v));
}

bool nondecreasing(const std::vector<double> &v, double slack)
{
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] < v[i - 1] - slack) {
            return false;
        }
    }
    return true;
}

} // namespace

void cmd_optimal_spinwave(const RunConfig &cfg)
{
    const std::vector<double> ds = d_values(cfg, {1, 10, 100});
    const auto dir = out_dir(cfg);
    std::vector<json> rows(ds.size());
    parallel_for(static_cast<int>(ds.size()), cfg.jobs, [&](int i) {
        const double d = ds[i];
        const OptimalSpinWave opt = optimum(cfg, d);
        // Stored-frame optimum S~_d(1 - zeta); real by construction.
        const SpinWave stored = flip(opt.mode);
        Csv csv({"zeta", "S"});
        for (int j = 0; j < stored.grid.size(); ++j) {
            csv.row({stored.grid.nodes()(j), stored.samples(j).real()});
        }
        const std::string file = "spinwave_d" + d_tag(d) + ".csv";
        write_file(dir / file, csv.text());
        rows[i] = {{"d", d}, {"eta_r_max", opt.eta_r_max}, {"iterations", opt.iterations}, {"file", file}};
    });
    write_json(dir / "optimal_spinwave.json", envelope("optimal-spinwave", cfg, rows));
}

void cmd_shape_controls(const RunConfig &cfg)
{
    const std::vector<double> ds = d_values(cfg, {1, 10, 100});
    const auto dir = out_dir(cfg);
    const FieldMode input = reference_input(cfg);
    write_file(dir / "input.csv", field_csv(input));
    std::vector<json> rows(ds.size());
    parallel_for(static_cast<int>(ds.size()), cfg.jobs, [&](int i) {
        const double d = ds[i];
        const MediumParams params(d, cfg.delta);
        const StorageControl sc = optimal_storage_control(input, params, cfg.kernel_nodes, cfg.h_max);
        const double scale = std::sqrt(cfg.T / d);
        Csv csv({"tau", "re_omega", "im_omega", "re_omega_fig", "im_omega_fig"});
        double peak = 0;
        for (int k = 0; k < input.grid.size(); ++k) {
            const Complex w = sc.control.samples(k);
            peak = std::max(peak, std::abs(w));
            csv.row({input.grid.tau(k), w.real(), w.imag(), scale * w.real(), scale * w.imag()});
        }
        const std::string file = "control_d" + d_tag(d) + ".csv";
        write_file(dir / file, csv.text());
        rows[i] = {{"d", d},
                   {"delta", cfg.delta},
                   {"predicted_eta_s", sc.predicted_eta_s},
                   {"h_max", sc.retrieval.h_max},
                   {"truncation_loss", sc.retrieval.truncation_loss},
                   {"truncated", sc.retrieval.truncated},
                   {"adiabatic_ok", sc.retrieval.adiabatic_ok},
                   {"max_abs_omega", peak},
                   {"fig_unit_scale", scale},
                   {"file", file}};
    });
    write_json(dir / "shape_controls.json", envelope("shape-controls", cfg, rows));
}

void cmd_curves(const RunConfig &cfg)
{
    const std::vector<double> ds = cfg.d ? *cfg.d : default_sweep(cfg);
    const auto dir = out_dir(cfg);
    const FieldMode input = reference_input(cfg);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    struct Point
    {
        double eta_r_max, eta_back, eta_forw, eta_square, eta_s_square;
        int forw_iterations = 0;
        bool forw_converged = false;
        std::vector<std::string> warnings;
    };
    std::vector<Point> pts(ds.size(), Point{nan, nan, nan, nan, nan, 0, false, {}});
    std::mutex log_mutex;
    parallel_for(static_cast<int>(ds.size()), cfg.jobs, [&](int i) {
        const double d = ds[i];
        const MediumParams params(d, cfg.delta);
        Point &p = pts[i];
        auto guarded = [&](const char *what, auto &&fn) {
            try {
                fn();
            } catch (const std::exception &e) {
                const std::string msg = std::string(what) + ": " + e.what();
                p.warnings.push_back(msg);
                std::lock_guard<std::mutex> lock(log_mutex);
                std::cerr << "warning: d = " << d << ": " << msg << "\n";
            }
        };
        guarded("kernel", [&] {
            p.eta_r_max = optimum(cfg, d).eta_r_max;
            p.eta_back = p.eta_r_max * p.eta_r_max;
        });
        guarded("forward", [&] {
            const StorageRetrievalResult r =
                optimize_storage_retrieval(params, input, Direction::forward, iter_options(cfg));
            p.eta_forw = r.eta_max;
            p.forw_iterations = r.trace.iterations;
            p.forw_converged = r.trace.converged;
        });
        guarded("square", [&] {
            const ControlField square = make_control("square", input.grid, params);
            const SimulationResult r = simulate_storage(input, square, params, sim_options(cfg));
            p.eta_s_square = r.breakdown.eta_storage;
            const SpinWave s = resample(r.final_state.spin_wave(), SpaceGrid::gauss_legendre(cfg.kernel_nodes));
            p.eta_square = spinwave_norm2(s) > 0
                ? p.eta_s_square * retrieval_efficiency(normalized(flip(s)), d)
                : 0.0;
        });
    });
    Csv csv({"d", "eta_back", "eta_forw", "eta_square"});
    json rows = json::array();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const Point &p = pts[i];
        csv.row({ds[i], p.eta_back, p.eta_forw, p.eta_square});
        rows.push_back({{"d", ds[i]},
                        {"eta_r_max", number(p.eta_r_max)},
                        {"eta_back", number(p.eta_back)},
                        {"eta_forw", number(p.eta_forw)},
                        {"eta_square", number(p.eta_square)},
                        {"eta_storage_square", number(p.eta_s_square)},
                        {"forward_iterations", p.forw_iterations},
                        {"forward_converged", p.forw_converged},
                        {"warnings", p.warnings}});
    }
    write_file(dir / "curves.csv", csv.text());
    write_json(dir / "curves.json", envelope("curves", cfg, rows));
}

void cmd_simulate(const RunConfig &cfg)
{
    const std::vector<double> ds = d_values(cfg, {10});
    const auto dir = out_dir(cfg);
    const FieldMode input = reference_input(cfg);
    const bool do_store = cfg.mode != "retrieval";
    const bool do_retrieve = cfg.mode != "storage";
    const Direction direction = cfg.direction == "forward" ? Direction::forward : Direction::backward;
    std::vector<json> rows(ds.size());
    parallel_for(static_cast<int>(ds.size()), cfg.jobs, [&](int i) {
        const double d = ds[i];
        const MediumParams params(d, cfg.delta);
        const std::string tag = d_tag(d);
        json row = {{"d", d}, {"delta", cfg.delta}};
        SpinWave stored;
        double eta_s = 1.0;
        if (do_store) {
            const ControlField ctrl = make_control(cfg.control, input.grid, params);
            const SimulationResult r = simulate_storage(input, ctrl, params, sim_options(cfg));
            write_file(dir / ("storage_output_d" + tag + ".csv"), field_csv(r.output_mode));
            write_file(dir / ("stored_spinwave_d" + tag + ".csv"), spinwave_csv(r.final_state.spin_wave()));
            row["storage"] = simulation_json(r);
            stored = r.final_state.spin_wave();
            eta_s = r.breakdown.eta_storage;
        } else {
            // The optimal stored wave for the chosen direction.
            const SpinWave opt = optimum(cfg, d).mode;
            stored = direction == Direction::backward ? flip(opt) : opt;
        }
        if (do_retrieve) {
            const ControlField ctrl = make_control(cfg.retrieval_control, input.grid, params);
            const SimulationResult r = simulate_retrieval(stored, ctrl, params, direction, sim_options(cfg));
            write_file(dir / ("retrieval_output_d" + tag + ".csv"), field_csv(r.output_mode));
            row["retrieval"] = simulation_json(r);
            row["eta_total"] = eta_s * r.breakdown.eta_retrieval;
        }
        rows[i] = std::move(row);
    });
    write_json(dir / "simulate.json", envelope("simulate", cfg, rows));
}

void cmd_iterate(const RunConfig &cfg)
{
    const std::vector<double> ds = d_values(cfg, {10});
    const auto dir = out_dir(cfg);
    const FieldMode input = reference_input(cfg);
    std::vector<json> rows(ds.size());
    parallel_for(static_cast<int>(ds.size()), cfg.jobs, [&](int i) {
        const double d = ds[i];
        const MediumParams params(d, cfg.delta);
        const IterationOptions opts = iter_options(cfg);
        const OptimalSpinWave opt = optimum(cfg, d);
        const SpinWave init = cfg.init == "random"
            ? random_smooth(opt.mode.grid, cfg.seed)
            : SpinWave::constant(opt.mode.grid, 1.0);
        const ControlField ctrl = completing_control(input.grid, cfg.h_max > 0 ? cfg.h_max : default_h_max(params));
        const IterationTrace tr = iterate_retrieval(params, ctrl, init, opts);

        Csv csv({"iteration", "eta_retrieval", "eta_storage", "mode_change"});
        for (std::size_t k = 0; k < tr.efficiencies.size(); ++k) {
            csv.row({double(k + 1), tr.efficiencies[k], tr.storage_efficiencies[k], tr.mode_changes[k]});
        }
        const std::string file = "iterate_d" + d_tag(d) + ".csv";
        write_file(dir / file, csv.text());

        std::vector<double> interleaved;
        for (std::size_t k = 0; k < tr.efficiencies.size(); ++k) {
            interleaved.push_back(tr.efficiencies[k]);
            interleaved.push_back(tr.storage_efficiencies[k]);
        }
        const StorageRetrievalResult back = optimize_storage_retrieval(params, input, Direction::backward, opts);
        const StorageRetrievalResult forw = optimize_storage_retrieval(params, input, Direction::forward, opts);
        const double dist = phase_aligned_distance(resample(tr.final_spin_wave, opt.mode.grid), opt.mode);
        rows[i] = {{"d", d},
                   {"eta_r_max_kernel", opt.eta_r_max},
                   {"retrieval", {{"eta", tr.final_efficiency()},
                                  {"iterations", tr.iterations},
                                  {"converged", tr.converged},
                                  {"monotone", nondecreasing(interleaved, 1e-6)},
                                  {"mode_distance_to_kernel", dist},
                                  {"file", file}}},
                   {"backward", {{"eta_max", back.eta_max},
                                 {"eta_input", back.eta_input},
                                 {"eta_r_max_squared", opt.eta_r_max * opt.eta_r_max},
                                 {"iterations", back.trace.iterations},
                                 {"converged", back.trace.converged},
                                 {"efficiencies", back.trace.efficiencies}}},
                   {"forward", {{"eta_max", forw.eta_max},
                                {"eta_input", forw.eta_input},
                                {"iterations", forw.trace.iterations},
                                {"converged", forw.trace.converged},
                                {"efficiencies", forw.trace.efficiencies}}}};
    });
    write_json(dir / "iterate.json", envelope("iterate", cfg, rows));
}

int run(int argc, char **argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args);
}

int run(const std::vector<std::string> &args)
{
    CLI::App app{"Optimal photon storage in atomic ensembles: kernels, controls, simulations."};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, d_list, delta, out, jobs, tol;
    std::vector<std::string> sets;
    app.add_option("--config", config_path, "flat 'key = value' config file");
    app.add_option("--d", d_list, "comma-separated optical depths");
    app.add_option("--delta", delta, "detuning in units of gamma");
    app.add_option("--out", out, "output directory");
    app.add_option("--jobs", jobs, "worker threads for sweeps");
    app.add_option("--tol", tol, "iteration tolerance (L2 change of the mode)");
    app.add_option("--set", sets, "extra KEY=VALUE overrides")->take_all();

    struct Sub
    {
        const char *name;
        const char *help;
        void (*fn)(const RunConfig &);
    };
    const Sub subs[] = {
        {"optimal-spinwave", "optimal spin waves and eta_r^max per d", cmd_optimal_spinwave},
        {"shape-controls", "optimal storage controls for the reference input", cmd_shape_controls},
        {"curves", "eta_back, eta_forw and eta_square against d", cmd_curves},
        {"simulate", "storage and/or retrieval with the full equations", cmd_simulate},
        {"iterate", "time-reversal iterations and their efficiencies", cmd_iterate},
    };
    for (const Sub &s : subs) {
        app.add_subcommand(s.name, s.help);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) {
            apply_config_file(cfg, config_path);
        }
        for (const std::string &kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
            }
            cfg.set(trim(kv.substr(0, eq)), kv.substr(eq + 1));
        }
        const std::pair<const char *, std::string *> flags[] = {
            {"d", &d_list}, {"delta", &delta}, {"out", &out}, {"jobs", &jobs}, {"tol", &tol}};
        for (const auto &[key, value] : flags) {
            if (!value->empty()) {
                cfg.set(key, *value);
            }
        }
        cfg.validate();
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }

    try {
        for (const Sub &s : subs) {
            if (app.got_subcommand(s.name)) {
                s.fn(cfg);
            }
        }
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const IoError &e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return exit_config;
    } catch (const InstabilityError &e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception &e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    }
    return exit_ok;
}

} // namespace qmem::cli
