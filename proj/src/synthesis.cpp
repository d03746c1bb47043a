#include "dpde/synthesis.hpp"

#include "dpde/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace dpde {

PFunction compute_p(const SpectralField& u_st, const Nonlinearity& b,
                    const SpatialKernel& f, const Basis& basis) {
    const size_t n = basis.quad_nodes.size();
    std::vector<double> bu(n);
    std::vector<double> uvals = evaluate_on_grid(u_st, basis);
    for (size_t q = 0; q < n; ++q) bu[q] = b(uvals[q]) * basis.quad_weights[q];
    PFunction p;
    p.values.resize(n);
    for (size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (size_t q = 0; q < n; ++q)
            s += bu[q] * f(basis.quad_nodes[i] - basis.quad_nodes[q]);
        p.values[i] = s;
    }
    p.p_min = *std::min_element(p.values.begin(), p.values.end());
    p.p_prime_max = 0.0;
    for (size_t i = 0; i + 1 < n; ++i) {
        double dx = basis.quad_nodes[i + 1] - basis.quad_nodes[i];
        p.p_prime_max = std::max(
            p.p_prime_max, std::abs(p.values[i + 1] - p.values[i]) / dx);
    }
    if (p.p_min <= 1e-12)
        throw InvalidState("degenerate equilibrium: p(x) is not bounded away "
                           "from zero, synthesis impossible");
    return p;
}

SpectralField synthesize_vhat(const SpectralField& u_st, double d,
                              const PFunction& p, const TimeProfile& chi,
                              const Basis& basis) {
    if (std::abs(chi.integral()) < 1e-12)
        throw ConfigError("synthesize_vhat: int chi vanishes (Achi)");
    if (p.p_min <= 1e-12)
        throw InvalidState("synthesize_vhat: p_min too small, division hazard");
    const size_t n = basis.quad_nodes.size();
    // A u_st is a genuine function here: u_st lies in the m-mode span.
    SpectralField numer = apply_A(u_st, basis) + d * u_st;
    std::vector<double> nvals = evaluate_on_grid(numer, basis);
    std::vector<double> vhat(n);
    for (size_t i = 0; i < n; ++i)
        vhat[i] = nvals[i] / (p.values[i] * chi.integral());
    return project(vhat, basis);
}

namespace {

struct TargetSlice {
    SpectralField u_st;
    TimeProfile chi;
    SpectralField vhat;
};

class SynthesizedKernel final : public DelayKernel {
public:
    SynthesizedKernel(std::vector<TargetSlice> targets, double rho,
                      const Basis& basis, ThetaQuad tq)
        : targets_(std::move(targets)), rho_(rho), tq_(std::move(tq)) {
        if (rho_ <= 0.0) throw ConfigError("synthesized kernel: rho must be positive");
        // Isolation: rho-balls around distinct targets must not overlap.
        for (size_t i = 0; i < targets_.size(); ++i)
            for (size_t j = i + 1; j < targets_.size(); ++j) {
                SpectralField diff = targets_[i].u_st - targets_[j].u_st;
                const double dist =
                    diff.l2_norm() * std::sqrt(1.0 + tq_.r); // const histories
                if (dist < 2.0 * rho_)
                    throw ConfigError("synthesized kernel: rho-balls overlap, "
                                      "targets are not isolated at radius rho");
            }
        double worst_mh = 0.0, worst_z = 0.0, worst_sup = 0.0, lip_sum = 0.0;
        for (const auto& t : targets_) {
            const double nmh = fractional_norm(t.vhat, -0.5, basis);
            const double nz = fractional_norm(t.vhat, 0.0, basis);
            double sup_chi = 0.0;
            for (int i = 0; i <= 2048; ++i)
                sup_chi = std::max(sup_chi,
                                   std::abs(t.chi(-tq_.r + i * tq_.r / 2048.0)));
            worst_mh = std::max(worst_mh, t.chi.abs_integral() * nmh);
            worst_z = std::max(worst_z, t.chi.abs_integral() * nz);
            worst_sup = std::max(worst_sup, sup_chi * nmh);
            lip_sum += t.chi.abs_integral() * nmh / rho_;
        }
        // 1.5 is the Lipschitz constant of the smoothstep ramp.
        declared_ = KernelBounds{1.02 * worst_mh, 1.02 * worst_z,
                                 (1.0 + 1e-9) * worst_sup, 1.1 * 1.5 * lip_sum};
    }

    // Smoothstep ramp on the h-distance: 1 exactly at the target, 0 outside
    // the rho-ball.  The slope vanishes at the target, so the blend does not
    // feed perturbations back into the stationarity balance there.
    double weight(const PhaseState& state, const TargetSlice& t) const {
        const double dist = h_distance_to_constant(state, t.u_st, tq_);
        const double x = std::clamp(1.0 - dist / rho_, 0.0, 1.0);
        return x * x * (3.0 - 2.0 * x);
    }

    SpectralField eval(double theta, const PhaseState& state,
                       const Basis&) const override {
        SpectralField out = zero_field(targets_.front().u_st.modes());
        for (const auto& t : targets_) {
            const double w = weight(state, t);
            if (w > 0.0) out += (w * t.chi(theta)) * t.vhat;
        }
        return out;
    }

    std::optional<KernelBounds> declared_bounds() const override { return declared_; }

    nlohmann::json describe() const override {
        nlohmann::json tj = nlohmann::json::array();
        for (const auto& t : targets_)
            tj.push_back({{"u_st", t.u_st.coeffs},
                          {"chi", t.chi.describe()},
                          {"vhat", t.vhat.coeffs}});
        return {{"family", "synthesized"}, {"rho", rho_}, {"targets", tj}};
    }
    std::string family() const override { return "synthesized"; }

private:
    std::vector<TargetSlice> targets_;
    double rho_;
    ThetaQuad tq_;
    KernelBounds declared_;
};

} // namespace

KernelPtr build_stationary_kernel(const std::vector<EquilibriumSpec>& specs,
                                  double rho, double d, const Nonlinearity& b,
                                  const SpatialKernel& f, const Basis& basis,
                                  const ThetaQuad& tq) {
    if (specs.empty()) throw ConfigError("no equilibrium targets given");
    std::vector<TargetSlice> slices;
    slices.reserve(specs.size());
    for (const auto& s : specs) {
        if (s.u_st.l2_norm() <= 0.0)
            throw ConfigError("target equilibrium must be nonzero");
        PFunction p = compute_p(s.u_st, b, f, basis);
        SpectralField vhat = synthesize_vhat(s.u_st, d, p, s.chi, basis);
        slices.push_back({s.u_st, s.chi, std::move(vhat)});
    }
    return std::make_shared<SynthesizedKernel>(std::move(slices), rho, basis, tq);
}

StationaryReport verify_stationary(const Discretization& disc,
                                   const SpectralField& u_st, double T,
                                   double residual_tol, double drift_tol) {
    const ModelConfig& cfg = disc.config();
    const Basis& basis = disc.basis();
    StationaryReport rep;

    PhaseState eq{u_st, constant_history(cfg.r, u_st)};
    SpectralField lhs = apply_A(u_st, basis) + cfg.d * u_st;
    SpectralField res = lhs - disc.eval_F(eq);
    rep.residual = fractional_norm(res, -0.5, basis);

    Trajectory traj =
        simulate(disc, u_st, [&](double) { return u_st; }, T);
    for (const auto& field : traj.fields)
        rep.max_drift = std::max(rep.max_drift, (field - u_st).l2_norm());
    rep.pass = rep.residual < residual_tol && rep.max_drift < drift_tol;
    return rep;
}

KernelPtr kernel_from_json(const nlohmann::json& j, const Basis& basis,
                           const ThetaQuad& tq) {
    const std::string fam = j.at("family");
    if (fam == "zero") return zero_kernel(j.value("modes", basis.m));
    if (fam == "constant_in_state") {
        SpectralField prof;
        prof.coeffs = j.at("profile").get<std::vector<double>>();
        return make_constant_in_state(std::move(prof),
                                      TimeProfile::from_json(j.at("chi")), basis);
    }
    if (fam == "delay_selective") {
        SpectralField prof;
        prof.coeffs = j.at("profile").get<std::vector<double>>();
        return make_delay_selective(j.at("r"), j.at("tau_min"), j.at("tau_max"),
                                    j.at("sigma"), std::move(prof), basis);
    }
    if (fam == "synthesized") {
        std::vector<TargetSlice> slices;
        for (const auto& t : j.at("targets")) {
            TargetSlice s{SpectralField{}, TimeProfile::from_json(t.at("chi")),
                          SpectralField{}};
            s.u_st.coeffs = t.at("u_st").get<std::vector<double>>();
            s.vhat.coeffs = t.at("vhat").get<std::vector<double>>();
            slices.push_back(std::move(s));
        }
        return std::make_shared<SynthesizedKernel>(std::move(slices),
                                                   j.at("rho").get<double>(),
                                                   basis, tq);
    }
    throw ConfigError("unknown kernel family: " + fam);
}

} // namespace dpde
