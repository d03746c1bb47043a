#pragma once

#include "dpde/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dpde {

// chi descriptor used in config files (resolved to a TimeProfile at build).
struct ChiSpec {
    std::string family = "constant"; // constant | gaussian_bump | signed_pair
    double value = 1.0;
    double center = -0.5;
    double width = 0.1;
    double center2 = -0.2;
    double ratio = 0.5;

    bool operator==(const ChiSpec&) const = default;
};

struct KernelSpec {
    std::string family = "delay_selective";
    // constant_in_state / delay_selective share a single-mode x-profile.
    int profile_mode = 1;
    double profile_amp = 1.0;
    // delay_selective
    double tau_min = 0.125;
    double tau_max = 0.875;
    double sigma = 0.125;
    // constant_in_state
    ChiSpec chi;
    // family = file: load a serialized kernel artifact (e.g. synthesized)
    std::string file;

    bool operator==(const KernelSpec&) const = default;
};

struct RunConfig {
    std::string command;     // simulate | synthesize | certify | probe
    std::string preset;      // "", nicholson_constant_f, nicholson_gaussian_f
    uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir = ".";

    // model
    double L = 1.0;
    int m = 16;
    int quad_order = 64;
    double d = 1.0;
    double r = 1.0;
    double dt = 1.0 / 256.0;
    int theta_panels = 32;
    std::string b_family = "nicholson_abs";
    double b_p = 1.0;
    double b_clip = 1.0;
    std::string f_family = "constant";
    double f_value = 1.0;
    double f_alpha = 0.05;
    KernelSpec kernel;

    // simulate
    double T = 5.0;
    std::string init_kind = "zero"; // zero | mode | random
    int init_mode = 1;
    double init_amp = 0.1;
    double init_radius = 1.0;
    std::string init_history = "constant"; // constant | zero
    int dt_refine = 0;

    // synthesize
    std::vector<int> synth_modes = {1, 2, 3};
    std::vector<double> synth_amps = {0.5, 1.0, 2.0};
    double synth_rho = 0.25;
    ChiSpec synth_chi;
    double synth_T = 10.0;

    // certify
    int certify_states = 200;
    double certify_radius = 2.0;

    // probe
    std::string probe_kind = "dissipativity"; // dissipativity | attractor
    std::vector<double> probe_radii = {1.0, 10.0, 100.0};
    double probe_T_max = 50.0;
    int probe_members = 8;
    double probe_T_transient = 20.0;
    double probe_T_observe = 10.0;
    double probe_init_radius = 1.0;

    bool operator==(const RunConfig&) const = default;
};

// Named presets from the Nicholson application.
RunConfig preset_config(const std::string& name);

// Flat `[section]` / `key = value` / `#`-comment text.  Preset defaults are
// applied first, explicit keys override, unknown keys are rejected with the
// offending line number.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

std::string emit_config(const RunConfig& cfg);

// Resolves descriptors into a validated ModelConfig with a live kernel.
ModelConfig build_model(const RunConfig& cfg);

TimeProfile build_chi(const ChiSpec& spec, double r);

} // namespace dpde
