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

#ifndef QMEMOPT_CLI_H
#define QMEMOPT_CLI_H

#include "qmemopt/core.h"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmem::cli {

// Bad key, value or flag. Exit code 1.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Unwritable output. Exit code 1.
class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_numerical = 2;

// Every key accepted in a config file (or by --set). See README for the
// meaning of each.
struct RunConfig
{
    std::optional<std::vector<double>> d;
    double delta = 0;
    double T = 20;          // input duration
    int n_time = 2001;
    int kernel_nodes = 200;
    int n_zeta = 256;
    double dtau = 0;        // simulator step cap; 0 = automatic
    double tol = 1e-4;      // iteration: L2 change of the mode
    double eff_tol = 1e-7;  // iteration: change of the efficiency
    double kernel_tol = 1e-10;
    int max_iter = 500;
    int jobs = 1;
    std::string out = "out";
    double input_center = 0.5;
    double input_sigma = 0.15;
    double d_min = 0.3;
    double d_max = 300;
    int d_points = 25;
    double h_max = 0;       // 0 = automatic
    std::string backend = "closed_form";     // closed_form | simulator
    std::string direction = "backward";      // backward | forward
    std::string mode = "both";               // storage | retrieval | both
    std::string control = "square";          // square | zero | complete | tau:re[:im],...
    std::string retrieval_control = "complete";
    std::string init = "uniform";            // uniform | random
    unsigned long seed = 1;

    // Assigns one key from its textual value; throws ConfigError naming the
    // key on unknown keys or bad values.
    void set(const std::string &key, const std::string &value);

    // Cross-field checks.
    void validate() const;

    static const std::vector<std::string> &keys();
};

// Flat "key = value" text with '#' comments, applied on top of cfg.
void apply_config_text(RunConfig &cfg, const std::string &text, const std::string &origin = "config");
void apply_config_file(RunConfig &cfg, const std::string &path);

// d values from the config, or the given default.
std::vector<double> d_values(const RunConfig &cfg, const std::vector<double> &fallback);

// Log-spaced sweep d_min..d_max with d_points points.
std::vector<double> default_sweep(const RunConfig &cfg);

// "square" (sqrt(d/T)), "zero", "complete" (smooth, energy h_max) or a
// piecewise-linear list "tau:re[:im], ..." sampled on grid; zero outside.
ControlField make_control(const std::string &spec, const TimeGrid &grid, const MediumParams &params);

// 17 significant digits.
std::string format_double(double x);

void cmd_optimal_spinwave(const RunConfig &cfg);
void cmd_shape_controls(const RunConfig &cfg);
void cmd_curves(const RunConfig &cfg);
void cmd_simulate(const RunConfig &cfg);
void cmd_iterate(const RunConfig &cfg);

// Full front end; returns the process exit code.
int run(int argc, char **argv);
int run(const std::vector<std::string> &args);

} // namespace qmem::cli

#endif // QMEMOPT_CLI_H
