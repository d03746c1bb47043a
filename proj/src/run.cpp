#include "dpde/run.hpp"

#include "dpde/diagnostics.hpp"
#include "dpde/errors.hpp"
#include "dpde/synthesis.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace dpde {

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open " + path + " for writing");
    out << text;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

SpectralField initial_field(const RunConfig& cfg) {
    SpectralField u0 = zero_field(cfg.m);
    if (cfg.init_kind == "zero") {
        // stays zero
    } else if (cfg.init_kind == "mode") {
        if (cfg.init_mode < 1 || cfg.init_mode > cfg.m)
            throw ConfigError("init.mode outside 1..m");
        u0.coeffs[cfg.init_mode - 1] = cfg.init_amp;
    } else if (cfg.init_kind == "random") {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int k = 1; k <= cfg.m; ++k) u0.coeffs[k - 1] = gauss(rng) / k;
        const double n = u0.l2_norm();
        if (n > 0.0) u0 *= cfg.init_radius / n;
    } else {
        throw ConfigError("unknown init.kind: " + cfg.init_kind);
    }
    return u0;
}

CertifiedConstants constants_for(const ModelConfig& mc, const Discretization& disc) {
    CertifiedConstants c;
    c.c_b = mc.b.bound();
    c.m_f = mc.f.bound();
    c.omega = mc.L;
    if (auto declared = mc.kernel->declared_bounds()) {
        c.c_minus_half = declared->c_minus_half;
        c.c_zero = declared->c_zero;
    } else {
        CertificateReport rep = certify_kernel(*mc.kernel, disc.basis(),
                                               disc.theta_quad(), 100, 2.0, 7);
        c.c_minus_half = rep.c_minus_half;
        c.c_zero = rep.c_zero;
    }
    return c;
}

int run_simulate(const RunConfig& cfg, const std::string& out_dir) {
    ModelConfig mc = build_model(cfg);
    Discretization disc(mc);
    SpectralField u0 = initial_field(cfg);
    HistoryFn phi;
    if (cfg.init_history == "constant")
        phi = [u0](double) { return u0; };
    else if (cfg.init_history == "zero")
        phi = [m = cfg.m](double) { return zero_field(m); };
    else
        throw ConfigError("unknown init.history: " + cfg.init_history);

    Trajectory traj;
    try {
        traj = simulate(disc, u0, phi, cfg.T);
    } catch (const BlowupError& e) {
        std::cerr << "blowup: " << e.what() << "\n";
        return kRunBlowup;
    }
    write_trajectory_csv(traj, out_dir + "/trajectory.csv");

    CertifiedConstants c = constants_for(mc, disc);
    AuditReport audit = audit_certificates(traj, mc, c);
    nlohmann::json aj = audit.to_json();
    aj["constants"] = {{"c_b", c.c_b},
                       {"m_f", c.m_f},
                       {"omega", c.omega},
                       {"c_minus_half", c.c_minus_half},
                       {"c_zero", c.c_zero},
                       {"k1", c.k1()}};
    write_json(out_dir + "/audit.json", aj);

    if (cfg.dt_refine > 0) {
        // Dyadic dt refinement: sup-difference of the L2 norm trace between
        // consecutive levels, and the observed convergence rates.
        nlohmann::json rj;
        std::vector<Trajectory> runs{traj};
        ModelConfig rc = mc;
        for (int k = 1; k <= cfg.dt_refine; ++k) {
            rc.dt /= 2.0;
            Discretization rdisc(rc);
            runs.push_back(simulate(rdisc, u0, phi, cfg.T));
        }
        std::vector<double> diffs;
        for (size_t k = 0; k + 1 < runs.size(); ++k) {
            double worst = 0.0;
            for (size_t i = 0; i < runs[k].times.size(); ++i) {
                const size_t j = i << (1u); // next level has half the step
                if (j >= runs[k + 1].fields.size()) break;
                worst = std::max(worst,
                                 (runs[k].fields[i] - runs[k + 1].fields[j]).l2_norm());
            }
            diffs.push_back(worst);
        }
        rj["sup_diffs"] = diffs;
        std::vector<double> rates;
        for (size_t k = 0; k + 1 < diffs.size(); ++k)
            rates.push_back(diffs[k + 1] > 0.0
                                ? std::log2(diffs[k] / diffs[k + 1])
                                : std::numeric_limits<double>::infinity());
        rj["rates"] = rates;
        write_json(out_dir + "/refine.json", rj);
    }
    return audit.pass ? kRunOk : kRunAuditFailed;
}

int run_synthesize(const RunConfig& cfg, const std::string& out_dir) {
    if (cfg.synth_modes.size() != cfg.synth_amps.size())
        throw ConfigError("synthesis.modes and synthesis.amps differ in length");
    ModelConfig mc = build_model(cfg);
    Basis basis = build_basis(cfg.L, cfg.m, cfg.quad_order);
    ThetaQuad tq = make_theta_quad(cfg.r, cfg.theta_panels);

    std::vector<EquilibriumSpec> specs;
    for (size_t i = 0; i < cfg.synth_modes.size(); ++i) {
        const int mode = cfg.synth_modes[i];
        if (mode < 1 || mode > cfg.m)
            throw ConfigError("synthesis target mode outside 1..m");
        SpectralField u = zero_field(cfg.m);
        u.coeffs[mode - 1] = cfg.synth_amps[i];
        specs.push_back({std::move(u), build_chi(cfg.synth_chi, cfg.r)});
    }
    KernelPtr kernel = build_stationary_kernel(specs, cfg.synth_rho, cfg.d, mc.b,
                                               mc.f, basis, tq);
    write_json(out_dir + "/kernel.json", kernel->describe());

    ModelConfig sim = mc;
    sim.kernel = kernel;
    Discretization disc(sim);

    CertificateReport cert = certify_kernel(*kernel, basis, tq, 100, 4.0,
                                            cfg.seed_set ? cfg.seed : 11);
    std::ostringstream rep;
    rep << "stationary kernel synthesis report\n";
    rep << "targets: " << specs.size() << ", rho = " << cfg.synth_rho << "\n\n";
    rep << "kernel certification (measured / declared):\n";
    auto decl = kernel->declared_bounds();
    rep << "  C_(-1/2): " << cert.c_minus_half << " / " << decl->c_minus_half << "\n";
    rep << "  C_0:      " << cert.c_zero << " / " << decl->c_zero << "\n";
    rep << "  ess-sup:  " << cert.ess_sup << " / " << decl->ess_sup << "\n";
    rep << "  Lipschitz:" << cert.lipschitz << " / " << decl->lipschitz << "\n";
    rep << "  contract: " << (cert.pass ? "pass" : "FAIL") << "\n\n";

    bool all_pass = cert.pass;
    for (size_t i = 0; i < specs.size(); ++i) {
        StationaryReport sr = verify_stationary(disc, specs[i].u_st,
                                                cfg.synth_T * cfg.r, 1e-8, 1e-4);
        rep << "target " << i + 1 << " (mode " << cfg.synth_modes[i] << ", amp "
            << cfg.synth_amps[i] << "): residual = " << sr.residual
            << ", max drift = " << sr.max_drift << " over T = "
            << cfg.synth_T * cfg.r << " -> " << (sr.pass ? "pass" : "FAIL")
            << "\n";
        all_pass = all_pass && sr.pass;
    }
    write_text(out_dir + "/synthesis_report.txt", rep.str());
    return all_pass ? kRunOk : kRunAuditFailed;
}

int run_certify(const RunConfig& cfg, const std::string& out_dir) {
    ModelConfig mc = build_model(cfg);
    Basis basis = build_basis(cfg.L, cfg.m, cfg.quad_order);
    ThetaQuad tq = make_theta_quad(cfg.r, cfg.theta_panels);
    CertificateReport rep = certify_kernel(*mc.kernel, basis, tq,
                                           cfg.certify_states, cfg.certify_radius,
                                           cfg.seed);
    write_json(out_dir + "/certificate.json", rep.to_json());
    return rep.pass ? kRunOk : kRunAuditFailed;
}

int run_probe(const RunConfig& cfg, const std::string& out_dir) {
    ModelConfig mc = build_model(cfg);
    Discretization disc(mc);
    if (cfg.probe_kind == "dissipativity") {
        CertifiedConstants c = constants_for(mc, disc);
        DissipativityReport rep = dissipativity_probe(disc, c, cfg.probe_radii,
                                                      cfg.probe_T_max, cfg.seed);
        write_json(out_dir + "/probe.json", rep.to_json());
        return kRunOk;
    }
    if (cfg.probe_kind == "attractor") {
        ProbeReport rep =
            attractor_probe(disc, cfg.probe_members, cfg.probe_T_transient,
                            cfg.probe_T_observe, cfg.probe_init_radius, cfg.seed);
        write_json(out_dir + "/probe.json", rep.to_json());
        return kRunOk;
    }
    throw ConfigError("unknown probe.kind: " + cfg.probe_kind);
}

} // namespace

int run_config(RunConfig cfg, const std::string& out_dir) {
    try {
        std::filesystem::create_directories(out_dir);
        if (cfg.command == "simulate") return run_simulate(cfg, out_dir);
        if (cfg.command == "synthesize") return run_synthesize(cfg, out_dir);
        if (cfg.command == "certify") return run_certify(cfg, out_dir);
        if (cfg.command == "probe") return run_probe(cfg, out_dir);
        throw ConfigError("unknown command: " + cfg.command);
    } catch (const BlowupError& e) {
        std::cerr << "blowup: " << e.what() << "\n";
        return kRunBlowup;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRunConfigError;
    } catch (const InvalidState& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRunConfigError;
    }
}

} // namespace dpde
