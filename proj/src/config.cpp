#include "dpde/config.hpp"

#include "dpde/errors.hpp"
#include "dpde/synthesis.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace dpde {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, int line) {
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) +
                          ": expected a number, got '" + v + "'");
    }
}

int to_int(const std::string& v, int line) {
    double x = to_double(v, line);
    int i = static_cast<int>(x);
    if (static_cast<double>(i) != x)
        throw ConfigError("line " + std::to_string(line) +
                          ": expected an integer, got '" + v + "'");
    return i;
}

std::vector<double> to_double_list(const std::string& v, int line) {
    std::vector<double> out;
    std::istringstream in(v);
    std::string tok;
    while (in >> tok) out.push_back(to_double(tok, line));
    if (out.empty())
        throw ConfigError("line " + std::to_string(line) + ": empty list");
    return out;
}

std::vector<int> to_int_list(const std::string& v, int line) {
    std::vector<int> out;
    for (double x : to_double_list(v, line)) {
        int i = static_cast<int>(x);
        if (static_cast<double>(i) != x)
            throw ConfigError("line " + std::to_string(line) +
                              ": expected integers");
        out.push_back(i);
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct RawEntry {
    std::string value;
    int line;
};
using RawConfig = std::map<std::string, std::map<std::string, RawEntry>>;

RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) +
                              ": key outside any [section]");
        raw[section][key] = {value, lineno};
    }
    return raw;
}

void apply_chi(ChiSpec& chi, const std::string& key, const RawEntry& e) {
    if (key == "family") chi.family = e.value;
    else if (key == "value") chi.value = to_double(e.value, e.line);
    else if (key == "center") chi.center = to_double(e.value, e.line);
    else if (key == "width") chi.width = to_double(e.value, e.line);
    else if (key == "center2") chi.center2 = to_double(e.value, e.line);
    else if (key == "ratio") chi.ratio = to_double(e.value, e.line);
    else
        throw ConfigError("line " + std::to_string(e.line) +
                          ": unknown chi key '" + key + "'");
}

} // namespace

RunConfig preset_config(const std::string& name) {
    RunConfig cfg; // struct defaults are the nicholson_constant_f preset
    cfg.preset = name;
    if (name == "nicholson_constant_f" || name.empty()) {
        // defaults
    } else if (name == "nicholson_gaussian_f") {
        cfg.f_family = "gaussian";
        cfg.f_alpha = 0.05;
    } else {
        throw ConfigError("unknown preset: " + name);
    }
    return cfg;
}

TimeProfile build_chi(const ChiSpec& spec, double r) {
    if (spec.family == "constant") return TimeProfile::constant(r, spec.value);
    if (spec.family == "gaussian_bump")
        return TimeProfile::gaussian_bump(r, spec.center, spec.width);
    if (spec.family == "signed_pair")
        return TimeProfile::signed_pair(r, spec.center, spec.center2, spec.width,
                                        spec.ratio);
    throw ConfigError("unknown chi family: " + spec.family);
}

RunConfig parse_config(const std::string& text) {
    RawConfig raw = tokenize(text);

    std::string preset;
    if (auto run = raw.find("run"); run != raw.end()) {
        if (auto p = run->second.find("preset"); p != run->second.end())
            preset = p->second.value;
    }
    RunConfig cfg = preset_config(preset);

    for (const auto& [section, entries] : raw) {
        for (const auto& [key, e] : entries) {
            if (section == "run") {
                if (key == "command") cfg.command = e.value;
                else if (key == "preset") cfg.preset = e.value;
                else if (key == "seed") {
                    cfg.seed = static_cast<uint64_t>(to_double(e.value, e.line));
                    cfg.seed_set = true;
                } else if (key == "out") cfg.out_dir = e.value;
                else if (key == "T") cfg.T = to_double(e.value, e.line);
                else if (key == "dt_refine") cfg.dt_refine = to_int(e.value, e.line);
                else goto unknown;
            } else if (section == "model") {
                if (key == "L") cfg.L = to_double(e.value, e.line);
                else if (key == "m") cfg.m = to_int(e.value, e.line);
                else if (key == "quad_order") cfg.quad_order = to_int(e.value, e.line);
                else if (key == "d") cfg.d = to_double(e.value, e.line);
                else if (key == "r") cfg.r = to_double(e.value, e.line);
                else if (key == "dt") cfg.dt = to_double(e.value, e.line);
                else if (key == "theta_panels") cfg.theta_panels = to_int(e.value, e.line);
                else goto unknown;
            } else if (section == "b") {
                if (key == "family") cfg.b_family = e.value;
                else if (key == "p") cfg.b_p = to_double(e.value, e.line);
                else if (key == "clip") cfg.b_clip = to_double(e.value, e.line);
                else goto unknown;
            } else if (section == "f") {
                if (key == "family") cfg.f_family = e.value;
                else if (key == "value") cfg.f_value = to_double(e.value, e.line);
                else if (key == "alpha") cfg.f_alpha = to_double(e.value, e.line);
                else goto unknown;
            } else if (section == "kernel") {
                if (key == "family") cfg.kernel.family = e.value;
                else if (key == "profile_mode") cfg.kernel.profile_mode = to_int(e.value, e.line);
                else if (key == "profile_amp") cfg.kernel.profile_amp = to_double(e.value, e.line);
                else if (key == "tau_min") cfg.kernel.tau_min = to_double(e.value, e.line);
                else if (key == "tau_max") cfg.kernel.tau_max = to_double(e.value, e.line);
                else if (key == "sigma") cfg.kernel.sigma = to_double(e.value, e.line);
                else if (key == "file") cfg.kernel.file = e.value;
                else goto unknown;
            } else if (section == "chi") {
                apply_chi(cfg.kernel.chi, key, e);
            } else if (section == "init") {
                if (key == "kind") cfg.init_kind = e.value;
                else if (key == "mode") cfg.init_mode = to_int(e.value, e.line);
                else if (key == "amp") cfg.init_amp = to_double(e.value, e.line);
                else if (key == "radius") cfg.init_radius = to_double(e.value, e.line);
                else if (key == "history") cfg.init_history = e.value;
                else goto unknown;
            } else if (section == "synthesis") {
                if (key == "modes") cfg.synth_modes = to_int_list(e.value, e.line);
                else if (key == "amps") cfg.synth_amps = to_double_list(e.value, e.line);
                else if (key == "rho") cfg.synth_rho = to_double(e.value, e.line);
                else if (key == "T") cfg.synth_T = to_double(e.value, e.line);
                else if (key.rfind("chi_", 0) == 0)
                    apply_chi(cfg.synth_chi, key.substr(4), e);
                else goto unknown;
            } else if (section == "certify") {
                if (key == "states") cfg.certify_states = to_int(e.value, e.line);
                else if (key == "radius") cfg.certify_radius = to_double(e.value, e.line);
                else goto unknown;
            } else if (section == "probe") {
                if (key == "kind") cfg.probe_kind = e.value;
                else if (key == "radii") cfg.probe_radii = to_double_list(e.value, e.line);
                else if (key == "T_max") cfg.probe_T_max = to_double(e.value, e.line);
                else if (key == "members") cfg.probe_members = to_int(e.value, e.line);
                else if (key == "T_transient") cfg.probe_T_transient = to_double(e.value, e.line);
                else if (key == "T_observe") cfg.probe_T_observe = to_double(e.value, e.line);
                else if (key == "init_radius") cfg.probe_init_radius = to_double(e.value, e.line);
                else goto unknown;
            } else {
                throw ConfigError("line " + std::to_string(e.line) +
                                  ": unknown section [" + section + "]");
            }
            continue;
        unknown:
            throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" +
                              section + "." + key + "'");
        }
    }

    if (cfg.command != "simulate" && cfg.command != "synthesize" &&
        cfg.command != "certify" && cfg.command != "probe")
        throw ConfigError("run.command must be one of simulate, synthesize, "
                          "certify, probe (got '" + cfg.command + "')");
    if (cfg.d <= 0.0) throw ConfigError("model.d: d must be positive");
    if (cfg.r <= 0.0) throw ConfigError("model.r: r must be positive");
    if (cfg.L <= 0.0) throw ConfigError("model.L: L must be positive");
    if ((cfg.command == "probe" || cfg.command == "certify") && !cfg.seed_set)
        throw ConfigError("run.seed is required for probe and certify");
    // chi blocks must satisfy Achi up front; TimeProfile enforces it.
    if (cfg.kernel.family == "constant_in_state") build_chi(cfg.kernel.chi, cfg.r);
    if (cfg.command == "synthesize") build_chi(cfg.synth_chi, cfg.r);
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string emit_config(const RunConfig& c) {
    std::ostringstream o;
    o << "[run]\n";
    o << "command = " << c.command << "\n";
    if (!c.preset.empty()) o << "preset = " << c.preset << "\n";
    if (c.seed_set) o << "seed = " << c.seed << "\n";
    o << "out = " << c.out_dir << "\n";
    o << "T = " << fmt(c.T) << "\n";
    o << "dt_refine = " << c.dt_refine << "\n";
    o << "\n[model]\n";
    o << "L = " << fmt(c.L) << "\nm = " << c.m
      << "\nquad_order = " << c.quad_order << "\nd = " << fmt(c.d)
      << "\nr = " << fmt(c.r) << "\ndt = " << fmt(c.dt)
      << "\ntheta_panels = " << c.theta_panels << "\n";
    o << "\n[b]\nfamily = " << c.b_family << "\np = " << fmt(c.b_p)
      << "\nclip = " << fmt(c.b_clip) << "\n";
    o << "\n[f]\nfamily = " << c.f_family << "\nvalue = " << fmt(c.f_value)
      << "\nalpha = " << fmt(c.f_alpha) << "\n";
    o << "\n[kernel]\nfamily = " << c.kernel.family
      << "\nprofile_mode = " << c.kernel.profile_mode
      << "\nprofile_amp = " << fmt(c.kernel.profile_amp)
      << "\ntau_min = " << fmt(c.kernel.tau_min)
      << "\ntau_max = " << fmt(c.kernel.tau_max)
      << "\nsigma = " << fmt(c.kernel.sigma) << "\n";
    if (!c.kernel.file.empty()) o << "file = " << c.kernel.file << "\n";
    auto emit_chi = [&](const ChiSpec& chi, const std::string& prefix) {
        o << prefix << "family = " << chi.family << "\n"
          << prefix << "value = " << fmt(chi.value) << "\n"
          << prefix << "center = " << fmt(chi.center) << "\n"
          << prefix << "width = " << fmt(chi.width) << "\n"
          << prefix << "center2 = " << fmt(chi.center2) << "\n"
          << prefix << "ratio = " << fmt(chi.ratio) << "\n";
    };
    o << "\n[chi]\n";
    emit_chi(c.kernel.chi, "");
    o << "\n[init]\nkind = " << c.init_kind << "\nmode = " << c.init_mode
      << "\namp = " << fmt(c.init_amp) << "\nradius = " << fmt(c.init_radius)
      << "\nhistory = " << c.init_history << "\n";
    o << "\n[synthesis]\nmodes =";
    for (int m : c.synth_modes) o << " " << m;
    o << "\namps =";
    for (double a : c.synth_amps) o << " " << fmt(a);
    o << "\nrho = " << fmt(c.synth_rho) << "\nT = " << fmt(c.synth_T) << "\n";
    emit_chi(c.synth_chi, "chi_");
    o << "\n[certify]\nstates = " << c.certify_states
      << "\nradius = " << fmt(c.certify_radius) << "\n";
    o << "\n[probe]\nkind = " << c.probe_kind << "\nradii =";
    for (double x : c.probe_radii) o << " " << fmt(x);
    o << "\nT_max = " << fmt(c.probe_T_max) << "\nmembers = " << c.probe_members
      << "\nT_transient = " << fmt(c.probe_T_transient)
      << "\nT_observe = " << fmt(c.probe_T_observe)
      << "\ninit_radius = " << fmt(c.probe_init_radius) << "\n";
    return o.str();
}

ModelConfig build_model(const RunConfig& c) {
    ModelConfig mc;
    mc.L = c.L;
    mc.m = c.m;
    mc.quad_order = c.quad_order;
    mc.d = c.d;
    mc.r = c.r;
    mc.dt = c.dt;
    mc.theta_panels = c.theta_panels;
    mc.b = Nonlinearity::from_json(
        {{"family", c.b_family}, {"p", c.b_p}, {"clip", c.b_clip}});
    if (c.f_family == "constant")
        mc.f = SpatialKernel::from_json({{"family", "constant"}, {"value", c.f_value}});
    else
        mc.f = SpatialKernel::from_json({{"family", "gaussian"}, {"alpha", c.f_alpha}});

    Basis basis = build_basis(c.L, c.m, c.quad_order);
    ThetaQuad tq = make_theta_quad(c.r, c.theta_panels);

    auto mode_profile = [&](int mode, double amp) {
        if (mode < 1 || mode > c.m)
            throw ConfigError("kernel profile mode outside 1..m");
        SpectralField p = zero_field(c.m);
        p.coeffs[mode - 1] = amp;
        return p;
    };

    const std::string& fam = c.kernel.family;
    if (fam == "zero") {
        mc.kernel = zero_kernel(c.m);
    } else if (fam == "constant_in_state") {
        mc.kernel = make_constant_in_state(
            mode_profile(c.kernel.profile_mode, c.kernel.profile_amp),
            build_chi(c.kernel.chi, c.r), basis);
    } else if (fam == "delay_selective") {
        mc.kernel = make_delay_selective(
            c.r, c.kernel.tau_min, c.kernel.tau_max, c.kernel.sigma,
            mode_profile(c.kernel.profile_mode, c.kernel.profile_amp), basis);
    } else if (fam == "file") {
        std::ifstream in(c.kernel.file);
        if (!in) throw ConfigError("cannot open kernel artifact: " + c.kernel.file);
        nlohmann::json j;
        in >> j;
        mc.kernel = kernel_from_json(j, basis, tq);
    } else {
        throw ConfigError("unknown kernel family: " + fam);
    }
    mc.validate();
    return mc;
}

} // namespace dpde
