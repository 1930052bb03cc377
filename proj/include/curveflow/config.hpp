#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curveflow/curve.hpp"
#include "curveflow/flow.hpp"

namespace curveflow::app {

using geom::ClosedCurve;

/// Configuration or usage error: maps to exit code 2 in the CLI.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Everything a scenario needs, resolved from defaults, an optional flat
/// key=value config file, and command-line overrides (flags win).
struct RunConfig {
    std::string initial = "ellipse:2,1"; // circle:r | ellipse:a,b | fourier:k:amp[,k:amp..] | file:path
    flow::Mode mode = flow::Mode::rescaled;
    std::size_t n_points = 256;
    double dt = 1e-3;        // frame step; substeps obey the stability bound
    double t_end = 8.0;
    std::size_t resample_every = 1;
    std::size_t record_every = 1; // frames per diagnostics record
    double burn_in = 1.0;         // T0 for envelope checks
    std::string output_dir = "out";
    double fit_window_lo = 2.0;
    double fit_window_hi = 6.0;
    std::optional<double> singular_time; // override for T = area / (2 pi)
    bool recenter = true;  // subtract the area centroid each frame
    double cfl = 0.25;
    std::size_t graph_points = 512; // reference-circle grid
    double resample_skip_spread = 1e-9;
    double quotient_floor_factor = 1e-14; // energy floor = factor * omega
    double ndot_slack = 0.05;             // slack on the assembled constant C

    // Sweep grid (sweep subcommand only).
    std::vector<int> sweep_modes = {2, 3};
    std::vector<double> sweep_amplitudes = {0.05, 0.1};
    std::size_t threads = 0; // 0 = hardware concurrency

    /// Set a field from a config-file or flag key; unknown keys throw.
    void set(const std::string& key, const std::string& value);
    void validate() const;

    std::map<std::string, std::string> as_key_values() const;
};

RunConfig load_config(const std::optional<std::string>& config_path,
                      const std::vector<std::pair<std::string, std::string>>& overrides);

/// Build the initial curve described by an initial spec, already resampled
/// to n vertices.  Malformed specs throw ConfigError naming the field.
ClosedCurve build_initial_curve(const std::string& spec, std::size_t n);

} // namespace curveflow::app
