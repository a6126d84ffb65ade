#ifndef DGT_CONFIG_HPP
#define DGT_CONFIG_HPP

#include "dgt/model.hpp"
#include "dgt/sampler.hpp"
#include "dgt/stepper.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dgt {

// One initial-data component: a named built-in or a snapshot file.
struct InitSpec {
    enum class Kind { constant, gaussian_bump, random_fourier, file };
    Kind kind = Kind::constant;
    double value = 1.0;                      // constant
    double cx = 0.5, cy = 0.5, sigma = 0.15; // gaussian-bump
    double amplitude = 1.0, floor = 0.1;
    std::uint64_t seed = 1;                  // random-fourier
    int modes = 4;
    double min = 0.5, max = 1.5;
    std::string path;                        // file

    ScalarField realize(const GridSpec& g) const;
};

struct RunConfig {
    // grid
    int nx = 64, ny = 64;
    double lx = 1.0, ly = 1.0;
    // model
    double l = 2.0;
    std::optional<double> eps;
    std::vector<double> eps_list;
    // initial data
    InitSpec u0, v0;
    // run
    double T = 1.0;
    int samples = 100;
    std::string run_id = "default";
    // stepper
    StepControl step;
    // audit knobs
    bool audit_enabled = true;
    double audit_b = 1.0;
    double audit_c_aux = 10.0;
    double audit_c_slack = 10.0;
    double audit_rel_tol = 1e-6;
    double audit_vmax_tol = 1e-9;
    double audit_l2_rel_tol = 1e-3;
    double audit_band = 0.25;
    std::vector<double> audit_p_list = {2.0};
    // lab
    std::vector<double> lab_p_list = {1.0};
    std::vector<double> lab_eta_list = {0.125};
    int lab_grid_n = 128;
    int lab_calib = 500;
    int lab_valid = 500;
    int lab_modes = 8;
    double lab_floor = 0.5;
    double lab_amp_lo = 0.5, lab_amp_hi = 2.0;
    // convergence study
    std::vector<int> conv_grid_list;
    double conv_tau_frac = 0.1;
    int conv_samples_base = 100;
    int conv_bank = 5;
    // misc
    std::string out_dir = "out";
    std::uint64_t seed = 12345;

    GridSpec grid() const { return GridSpec(nx, ny, lx, ly); }
};

// Line-oriented "section.key = value" text; '#' starts a comment. Unknown
// keys, type mismatches, and range violations are errors carrying the line
// number. Missing keys fall back to the documented defaults; the few truly
// required ones are checked by the subcommands.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

} // namespace dgt

#endif
