#include "dpde/kernels.hpp"

#include "dpde/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <random>

namespace dpde {

namespace {

// Dense Simpson on [a, b] for scalar integrands (construction-time only).
double dense_integral(const std::function<double(double)>& f, double a, double b,
                      int panels = 4000) {
    if (panels % 2 != 0) ++panels;
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i)
        acc += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
    return acc * h / 3.0;
}

double bump_mass_constant() {
    // int_{-1}^{1} exp(-1/(1-u^2)) du, cached.
    static const double n = dense_integral(
        [](double u) {
            double d = 1.0 - u * u;
            return d > 0.0 ? std::exp(-1.0 / d) : 0.0;
        },
        -1.0, 1.0, 20000);
    return n;
}

} // namespace

double bump(double s, double sigma) {
    const double u = s / sigma;
    const double d = 1.0 - u * u;
    if (d <= 0.0) return 0.0;
    return std::exp(-1.0 / d) / (sigma * bump_mass_constant());
}

double bump_peak(double sigma) {
    return std::exp(-1.0) / (sigma * bump_mass_constant());
}

// ---- TimeProfile ---------------------------------------------------------

TimeProfile::TimeProfile(double r, Family fam, std::vector<double> params,
                         std::function<double(double)> fn)
    : r_(r), family_(fam), params_(std::move(params)), fn_(std::move(fn)) {
    if (r <= 0.0) throw ConfigError("TimeProfile: r must be positive");
    integral_ = dense_integral(fn_, -r_, 0.0);
    abs_integral_ = dense_integral([this](double t) { return std::abs(fn_(t)); },
                                   -r_, 0.0);
    if (std::abs(integral_) < 1e-12)
        throw ConfigError("TimeProfile: int chi over [-r,0] vanishes (Achi)");
    if (!std::isfinite(abs_integral_))
        throw ConfigError("TimeProfile: int |chi| not finite (Achi)");
}

TimeProfile TimeProfile::constant(double r, double value) {
    return TimeProfile(r, Family::Constant, {value},
                       [value](double) { return value; });
}

TimeProfile TimeProfile::gaussian_bump(double r, double center, double width) {
    if (width <= 0.0) throw ConfigError("TimeProfile: width must be positive");
    return TimeProfile(r, Family::GaussianBump, {center, width},
                       [center, width](double t) {
                           double z = (t - center) / width;
                           return std::exp(-0.5 * z * z);
                       });
}

TimeProfile TimeProfile::signed_pair(double r, double c1, double c2, double width,
                                     double ratio) {
    if (width <= 0.0) throw ConfigError("TimeProfile: width must be positive");
    return TimeProfile(r, Family::SignedPair, {c1, c2, width, ratio},
                       [c1, c2, width, ratio](double t) {
                           double z1 = (t - c1) / width;
                           double z2 = (t - c2) / width;
                           return std::exp(-0.5 * z1 * z1) -
                                  ratio * std::exp(-0.5 * z2 * z2);
                       });
}

nlohmann::json TimeProfile::describe() const {
    const char* name = family_ == Family::Constant     ? "constant"
                       : family_ == Family::GaussianBump ? "gaussian_bump"
                                                         : "signed_pair";
    return {{"family", name}, {"r", r_}, {"params", params_}};
}

TimeProfile TimeProfile::from_json(const nlohmann::json& j) {
    const std::string fam = j.at("family");
    const double r = j.at("r");
    const auto p = j.at("params").get<std::vector<double>>();
    if (fam == "constant") return constant(r, p.at(0));
    if (fam == "gaussian_bump") return gaussian_bump(r, p.at(0), p.at(1));
    if (fam == "signed_pair") return signed_pair(r, p.at(0), p.at(1), p.at(2), p.at(3));
    throw ConfigError("unknown chi family: " + fam);
}

// ---- built-in kernels ----------------------------------------------------

namespace {

class ZeroKernel final : public DelayKernel {
public:
    explicit ZeroKernel(int modes) : modes_(modes) {}
    SpectralField eval(double, const PhaseState&, const Basis&) const override {
        return zero_field(modes_);
    }
    std::optional<KernelBounds> declared_bounds() const override {
        return KernelBounds{0.0, 0.0, 0.0, 0.0};
    }
    nlohmann::json describe() const override {
        return {{"family", "zero"}, {"modes", modes_}};
    }
    std::string family() const override { return "zero"; }

private:
    int modes_;
};

class ConstantInStateKernel final : public DelayKernel {
public:
    ConstantInStateKernel(SpectralField profile, TimeProfile chi, const Basis& basis)
        : profile_(std::move(profile)), chi_(std::move(chi)) {
        const double nmh = fractional_norm(profile_, -0.5, basis);
        const double nz = fractional_norm(profile_, 0.0, basis);
        double sup_chi = 0.0;
        for (int i = 0; i <= 2048; ++i) {
            double th = -chi_.r() + i * chi_.r() / 2048.0;
            sup_chi = std::max(sup_chi, std::abs(chi_(th)));
        }
        // Headroom covers the mismatch between the dense construction-time
        // integral of |chi| and whatever composite theta rule a caller uses.
        const double head = chi_.family() == TimeProfile::Family::Constant
                                ? 1.0 + 1e-9
                                : 1.02;
        declared_ = KernelBounds{chi_.abs_integral() * nmh * head,
                                 chi_.abs_integral() * nz * head,
                                 sup_chi * nmh * (1.0 + 1e-9), 0.0};
    }

    SpectralField eval(double theta, const PhaseState&, const Basis&) const override {
        return chi_(theta) * profile_;
    }
    std::optional<KernelBounds> declared_bounds() const override { return declared_; }
    nlohmann::json describe() const override {
        return {{"family", "constant_in_state"},
                {"profile", profile_.coeffs},
                {"chi", chi_.describe()}};
    }
    std::string family() const override { return "constant_in_state"; }

private:
    SpectralField profile_;
    TimeProfile chi_;
    KernelBounds declared_;
};

class DelaySelectiveKernel final : public DelayKernel {
public:
    DelaySelectiveKernel(double r, double tau_min, double tau_max, double sigma,
                         SpectralField profile, const Basis& basis)
        : r_(r), tau_min_(tau_min), tau_max_(tau_max), sigma_(sigma),
          profile_(std::move(profile)) {
        if (sigma <= 0.0) throw ConfigError("delay_selective: sigma must be positive");
        if (tau_min > tau_max)
            throw ConfigError("delay_selective: tau_min must be <= tau_max");
        if (tau_min - sigma < 0.0 || tau_max + sigma > r)
            throw ConfigError("delay_selective: bump support leaves [0, r]");
        const double nmh = fractional_norm(profile_, -0.5, basis);
        const double nz = fractional_norm(profile_, 0.0, basis);
        const double peak = bump_peak(sigma);
        const double lip_tau = tau_max - tau_min; // d/ds [s/(1+s)] <= 1
        declared_ = KernelBounds{1.02 * nmh, 1.02 * nz, peak * nmh * (1.0 + 1e-9),
                                 1.1 * 2.0 * peak * lip_tau * nmh};
    }

    double tau(double vnorm) const {
        return tau_min_ + (tau_max_ - tau_min_) * vnorm / (1.0 + vnorm);
    }

    SpectralField eval(double theta, const PhaseState& state,
                       const Basis&) const override {
        const double t = tau(state.v.l2_norm());
        return bump(theta + t, sigma_) * profile_;
    }
    std::optional<KernelBounds> declared_bounds() const override { return declared_; }
    nlohmann::json describe() const override {
        return {{"family", "delay_selective"},
                {"r", r_},
                {"tau_min", tau_min_},
                {"tau_max", tau_max_},
                {"sigma", sigma_},
                {"profile", profile_.coeffs}};
    }
    std::string family() const override { return "delay_selective"; }

private:
    double r_, tau_min_, tau_max_, sigma_;
    SpectralField profile_;
    KernelBounds declared_;
};

} // namespace

KernelPtr make_constant_in_state(SpectralField profile, TimeProfile chi,
                                 const Basis& basis) {
    return std::make_shared<ConstantInStateKernel>(std::move(profile),
                                                   std::move(chi), basis);
}

KernelPtr make_delay_selective(double r, double tau_min, double tau_max,
                               double sigma, SpectralField profile,
                               const Basis& basis) {
    return std::make_shared<DelaySelectiveKernel>(r, tau_min, tau_max, sigma,
                                                  std::move(profile), basis);
}

KernelPtr zero_kernel(int modes) { return std::make_shared<ZeroKernel>(modes); }

// ---- certification -------------------------------------------------------

namespace {

SpectralField random_smooth_field(std::mt19937_64& rng, int m) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    SpectralField f = zero_field(m);
    for (int k = 1; k <= m; ++k)
        f.coeffs[k - 1] = gauss(rng) / (k * k);
    return f;
}

PhaseState random_state(std::mt19937_64& rng, const Basis& basis,
                        const ThetaQuad& tq, double radius) {
    const double r = tq.r;
    const int hist_steps = 8;
    HistorySegment h(r, basis.m);
    for (int j = 0; j <= hist_steps; ++j)
        h.push(-r + j * r / hist_steps, random_smooth_field(rng, basis.m));
    PhaseState s{h.sample(0.0), std::move(h)};
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    const double target = radius * unif(rng);
    const double cur = h_norm(s, tq);
    if (cur > 0.0) {
        const double scale = target / cur;
        // Rebuild scaled (entries are immutable once pushed).
        HistorySegment hs(r, basis.m);
        for (int j = 0; j <= hist_steps; ++j)
            hs.push(-r + j * r / hist_steps, scale * s.history.sample(-r + j * r / hist_steps - 0.0));
        PhaseState out{scale * s.v, std::move(hs)};
        return out;
    }
    return s;
}

} // namespace

std::vector<PhaseState> sample_states(const Basis& basis, const ThetaQuad& tq,
                                      int count, double radius, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<PhaseState> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i)
        out.push_back(random_state(rng, basis, tq, radius));
    return out;
}

double certify_bound_minus_half(const DelayKernel& k,
                                const std::vector<PhaseState>& states,
                                const ThetaQuad& tq, const Basis& basis) {
    if (states.empty()) throw InvalidInput("certify: empty state sample");
    double worst = 0.0;
    for (const auto& s : states) {
        double acc = 0.0;
        for (size_t j = 0; j < tq.nodes.size(); ++j)
            acc += tq.weights[j] *
                   fractional_norm(k.eval(tq.nodes[j], s, basis), -0.5, basis);
        worst = std::max(worst, acc);
    }
    return worst;
}

double certify_bound_zero(const DelayKernel& k,
                          const std::vector<PhaseState>& states,
                          const ThetaQuad& tq, const Basis& basis) {
    if (states.empty()) throw InvalidInput("certify: empty state sample");
    double worst = 0.0;
    for (const auto& s : states) {
        double acc = 0.0;
        for (size_t j = 0; j < tq.nodes.size(); ++j)
            acc += tq.weights[j] *
                   fractional_norm(k.eval(tq.nodes[j], s, basis), 0.0, basis);
        worst = std::max(worst, acc);
    }
    return worst;
}

double certify_ess_sup(const DelayKernel& k,
                       const std::vector<PhaseState>& states,
                       const std::vector<double>& theta_grid, const Basis& basis) {
    if (states.empty()) throw InvalidInput("certify: empty state sample");
    double worst = 0.0;
    for (const auto& s : states)
        for (double th : theta_grid)
            worst = std::max(worst,
                             fractional_norm(k.eval(th, s, basis), -0.5, basis));
    return worst;
}

double estimate_lipschitz(const DelayKernel& k, double radius, int n_pairs,
                          uint64_t seed, const Basis& basis, const ThetaQuad& tq) {
    if (radius <= 0.0) throw ConfigError("estimate_lipschitz: radius must be positive");
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int i = 0; i < n_pairs; ++i) {
        PhaseState a = random_state(rng, basis, tq, radius);
        PhaseState b = random_state(rng, basis, tq, radius);
        if (i % 2 != 0) {
            // Nearby pair: probes the local slope, where state-selective
            // kernels are most sensitive.
            std::normal_distribution<double> gauss(0.0, 1.0);
            const double eps = 1e-4 * radius;
            SpectralField dv = random_smooth_field(rng, basis.m);
            double nd = dv.l2_norm();
            if (nd > 0) dv *= eps / nd;
            HistorySegment hb(tq.r, basis.m);
            for (int j = 0; j <= 8; ++j) {
                double t = -tq.r + j * tq.r / 8;
                hb.push(t, a.history.sample(t) + dv);
            }
            b = PhaseState{a.v + dv, std::move(hb)};
        }
        const double dist = h_distance(a, b, tq);
        if (dist < 1e-12) continue;
        double num = 0.0;
        for (size_t j = 0; j < tq.nodes.size(); ++j) {
            SpectralField diff = k.eval(tq.nodes[j], a, basis) -
                                 k.eval(tq.nodes[j], b, basis);
            num += tq.weights[j] * fractional_norm(diff, -0.5, basis);
        }
        worst = std::max(worst, num / dist);
    }
    return worst;
}

nlohmann::json CertificateReport::to_json() const {
    nlohmann::json j{{"c_minus_half", c_minus_half},
                     {"c_zero", c_zero},
                     {"ess_sup", ess_sup},
                     {"lipschitz", lipschitz},
                     {"pass", pass}};
    if (declared) {
        j["declared"] = {{"c_minus_half", declared->c_minus_half},
                         {"c_zero", declared->c_zero},
                         {"ess_sup", declared->ess_sup},
                         {"lipschitz", declared->lipschitz}};
    }
    return j;
}

CertificateReport certify_kernel(const DelayKernel& k, const Basis& basis,
                                 const ThetaQuad& tq, int n_states,
                                 double radius, uint64_t seed) {
    CertificateReport rep;
    auto states = sample_states(basis, tq, n_states, radius, seed);
    rep.c_minus_half = certify_bound_minus_half(k, states, tq, basis);
    rep.c_zero = certify_bound_zero(k, states, tq, basis);
    std::vector<double> grid(513);
    for (int i = 0; i <= 512; ++i) grid[i] = -tq.r + i * tq.r / 512.0;
    rep.ess_sup = certify_ess_sup(k, states, grid, basis);
    rep.lipschitz = estimate_lipschitz(k, radius, n_states, seed + 1, basis, tq);
    rep.declared = k.declared_bounds();
    if (rep.declared) {
        rep.pass = rep.c_minus_half <= rep.declared->c_minus_half &&
                   rep.c_zero <= rep.declared->c_zero &&
                   rep.ess_sup <= rep.declared->ess_sup &&
                   rep.lipschitz <= rep.declared->lipschitz;
    }
    return rep;
}

} // namespace dpde
