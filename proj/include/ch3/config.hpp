#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "ch3/state.hpp"

namespace ch3 {

/// Thrown on malformed configuration with a file:line-qualified message.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat, commented key=value configuration with dotted section keys.
/// Environment variables override file values: CH3LAB_<KEY> with dots
/// replaced by underscores, e.g. CH3LAB_GRID_N=2048.
struct SimConfig {
    // grid
    std::size_t grid_n = 1024;
    double grid_L = 40.0;

    // initial data
    std::string generator = "gaussian_triple";
    // zero | gaussian_triple | sech_triple | potential_sech | peakon |
    // steep_front | random_smooth
    std::array<double, 3> amplitude{0.4, 0.3, 0.35};
    std::array<double, 3> center{-2.0, 0.0, 2.0};
    std::array<double, 3> width{2.0, 1.7, 2.2};
    double tail_rate = 0.5;        // sech_triple / potential_sech exponent
    double mollify_epsilon = 0.0;  // bump support radius; 0 disables
    std::vector<double> peakon_positions{0.0};
    std::vector<double> peakon_p{1.0};
    std::vector<double> peakon_r{0.0};
    std::vector<double> peakon_s{0.0};
    double front_amplitude = 1.0;
    double front_width = 0.1;
    double front_envelope = 2.0;

    // time stepping
    double dt = 0.01;
    double cfl = 0.5;
    double dt_min = 1e-6;
    double slope_threshold = 0.0;  // <= 0 selects 50 sqrt(E0)

    // run horizon and output cadence
    double t_end = 10.0;
    double cadence = 0.1;

    // diagnostics toggles
    bool riccati = true;
    std::string decay_sides = "none";  // none | left | right | both
    std::string weighted;              // e.g. "JN:0.5:4;phiN:0.5:4" -> named columns
    double potential_lambda = -1.0;    // >= 0 adds the potential-decay study
    int potential_p = 1;

    // output
    std::string out_dir = "out";
    bool snapshots = true;
    unsigned long seed = 12345;

    // study parameters
    std::vector<double> blowup_deltas{0.2, 0.1, 0.06, 0.045};
    std::vector<double> kernel_alphas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<int> kernel_Ns{1, 2, 4, 8, 16};
};

SimConfig load_config(const std::filesystem::path& path, bool apply_env = true);
SimConfig config_from_text(const std::string& text, const std::string& origin = "<text>",
                           bool apply_env = true);
std::string print_defaults();

/// Build the configured initial state (grid + generator + optional mollify).
StateTriple build_initial_state(const SimConfig& cfg);

}  // namespace ch3
