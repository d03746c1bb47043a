#include "dpde/diagnostics.hpp"

#include "dpde/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <random>

namespace dpde {

double DenseSolution::at(double t) const {
    const double pos = (t - t0) / h;
    if (pos <= 0.0) return y.front();
    if (pos >= static_cast<double>(y.size() - 1)) return y.back();
    const size_t i = static_cast<size_t>(pos);
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * y[i] + w * y[i + 1];
}

DenseSolution method_of_steps_oracle(const ReducedDelayOde& ode,
                                     const std::function<double(double)>& phi,
                                     double y0, double T, double h) {
    if (h <= 0.0 || T <= 0.0) throw ConfigError("oracle: T and h must be positive");
    // Align the grid so r is an integer number of substeps.
    const int K = std::max(1, static_cast<int>(std::round(ode.r / h)));
    h = ode.r / K;
    const int n_total = K + static_cast<int>(std::ceil(T / h - 1e-9));

    DenseSolution sol;
    sol.t0 = -ode.r;
    sol.h = h;
    sol.y.resize(n_total + 1);
    std::vector<double> B(n_total + 1);
    for (int i = 0; i < K; ++i) {
        sol.y[i] = phi(-ode.r + i * h);
        B[i] = ode.feedback(sol.y[i]);
    }
    sol.y[K] = y0;
    B[K] = ode.feedback(y0);

    // Running trapezoid of B over the trailing window [t - r, t].
    double W = 0.0;
    for (int i = 0; i < K; ++i) W += 0.5 * h * (B[i] + B[i + 1]);

    auto rhs = [&](double y, double w) {
        return -ode.a * y + ode.gain * ode.chi_const * w;
    };
    // Window integral advanced by gamma*h: leading edge uses the stage
    // estimate, trailing edge linear interpolation of stored values.
    auto w_at = [&](int n, double gamma, double y_est) {
        const double lead = 0.5 * gamma * h * (B[n] + ode.feedback(y_est));
        const int j = n - K;
        const double b_mid = (1.0 - gamma) * B[j] + gamma * B[j + 1];
        const double trail = 0.5 * gamma * h * (B[j] + b_mid);
        return W + lead - trail;
    };

    for (int n = K; n < n_total; ++n) {
        const double y = sol.y[n];
        const double k1 = rhs(y, W);
        const double y2 = y + 0.5 * h * k1;
        const double k2 = rhs(y2, w_at(n, 0.5, y2));
        const double y3 = y + 0.5 * h * k2;
        const double k3 = rhs(y3, w_at(n, 0.5, y3));
        const double y4 = y + h * k3;
        const double k4 = rhs(y4, w_at(n, 1.0, y4));
        sol.y[n + 1] = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        B[n + 1] = ode.feedback(sol.y[n + 1]);
        W += 0.5 * h * (B[n] + B[n + 1]) - 0.5 * h * (B[n - K] + B[n - K + 1]);
    }
    // Drop the history part so index 0 is t = 0.
    sol.y.erase(sol.y.begin(), sol.y.begin() + K);
    sol.t0 = 0.0;
    return sol;
}

double CertifiedConstants::k1() const {
    const double c = c_b * m_f * omega * c_minus_half;
    return c * c;
}

nlohmann::json AuditReport::to_json() const {
    return {{"energy_margin_min", energy_margin_min},
            {"weak_bound_margin_min", weak_bound_margin_min},
            {"strong_bound_margin_min", strong_bound_margin_min},
            {"pass", pass}};
}

AuditReport audit_certificates(const Trajectory& traj, const ModelConfig& cfg,
                               const CertifiedConstants& c, double tol) {
    if (traj.times.empty()) throw InvalidInput("audit: empty trajectory");
    AuditReport rep;
    const double k1 = c.k1();
    const double u0_sq = traj.norm_l2.front() * traj.norm_l2.front();
    const double cw = c.c_b * c.m_f * c.omega * c.c_minus_half;
    const double cs = c.c_b * c.m_f * c.omega * c.c_zero;

    double chi_integral = 0.0;
    rep.energy_margin_min = std::numeric_limits<double>::infinity();
    rep.weak_bound_margin_min = std::numeric_limits<double>::infinity();
    rep.strong_bound_margin_min = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const double nu = traj.norm_l2[i];
        const double na = traj.norm_h1[i];
        // Right-endpoint rule for the dissipation integral: it approximates
        // from below when the energy decays, so the margin converges to the
        // continuous one from above at rate O(dt) instead of tripping on
        // stiff high modes with lambda_k dt = O(1).
        if (i > 0) chi_integral += cfg.dt * (na * na + 2.0 * cfg.d * nu * nu);
        const double chi_t = nu * nu + chi_integral;
        rep.energy_margin_min =
            std::min(rep.energy_margin_min, u0_sq + k1 * traj.times[i] - chi_t);
        rep.weak_bound_margin_min = std::min(
            rep.weak_bound_margin_min, cw * na - std::abs(traj.inner_F_u[i]));
        rep.strong_bound_margin_min = std::min(
            rep.strong_bound_margin_min, cs * nu - std::abs(traj.inner_F_u[i]));
    }
    rep.pass = rep.energy_margin_min >= -tol &&
               rep.weak_bound_margin_min >= -tol &&
               rep.strong_bound_margin_min >= -tol;
    return rep;
}

namespace {

SpectralField random_ball_field(std::mt19937_64& rng, int m, double radius) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    SpectralField f = zero_field(m);
    for (int k = 1; k <= m; ++k) f.coeffs[k - 1] = gauss(rng) / k;
    const double n = f.l2_norm();
    if (n > 0.0) f *= radius / n;
    return f;
}

} // namespace

nlohmann::json DissipativityReport::to_json() const {
    nlohmann::json entries_j = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json ej{{"radius", e.radius},
                          {"max_after_entry", e.max_after_entry},
                          {"stayed_inside", e.stayed_inside}};
        if (e.entry_time) ej["entry_time"] = *e.entry_time;
        else ej["status"] = "inconclusive";
        entries_j.push_back(std::move(ej));
    }
    return {{"threshold", threshold}, {"entries", entries_j}, {"pass", pass}};
}

DissipativityReport dissipativity_probe(const Discretization& disc,
                                        const CertifiedConstants& c,
                                        const std::vector<double>& radii,
                                        double T_max, uint64_t seed) {
    const ModelConfig& cfg = disc.config();
    const double lambda1 = disc.basis().lambda.front();
    DissipativityReport rep;
    rep.threshold = 1.05 * c.k1() / (lambda1 + 2.0 * cfg.d);
    rep.pass = true;

    std::mt19937_64 rng(seed);
    for (double R : radii) {
        if (R <= 0.0) throw ConfigError("probe radii must be positive");
        RadiusEntry entry;
        entry.radius = R;
        SpectralField u0 = random_ball_field(rng, cfg.m, R);
        Trajectory traj = simulate(disc, u0, [&](double) { return u0; }, T_max);
        for (size_t i = 0; i < traj.times.size(); ++i) {
            const double nsq = traj.norm_l2[i] * traj.norm_l2[i];
            if (!entry.entry_time) {
                if (nsq <= rep.threshold) entry.entry_time = traj.times[i];
            } else {
                entry.max_after_entry = std::max(entry.max_after_entry, nsq);
            }
        }
        entry.stayed_inside =
            entry.entry_time.has_value() &&
            entry.max_after_entry <= 1.10 * rep.threshold;
        if (!entry.stayed_inside) rep.pass = false;
        rep.entries.push_back(entry);
    }
    return rep;
}

nlohmann::json ProbeReport::to_json() const {
    return {{"terminal_diameter", terminal_diameter},
            {"hausdorff_shift", hausdorff_shift},
            {"max_terminal_norm", max_terminal_norm},
            {"pass", pass}};
}

ProbeReport attractor_probe(const Discretization& disc, int n_members,
                            double T_transient, double T_observe,
                            double init_radius, uint64_t seed) {
    if (n_members < 2) throw ConfigError("attractor probe needs >= 2 members");
    const ModelConfig& cfg = disc.config();
    const ThetaQuad& tq = disc.theta_quad();
    const double t1 = T_transient + T_observe;
    const double t2 = T_transient + 2.0 * T_observe;

    struct MemberResult {
        PhaseState slice1;
        PhaseState slice2;
    };

    auto run_member = [&](uint64_t member_seed) -> MemberResult {
        std::mt19937_64 rng(member_seed);
        SpectralField u0 = random_ball_field(rng, cfg.m, init_radius);
        HistorySegment hist(cfg.r, cfg.m);
        const int hist_steps = static_cast<int>(std::round(cfg.r / cfg.dt));
        for (int j = 0; j < hist_steps; ++j) hist.push(-cfg.r + j * cfg.dt, u0);
        hist.push(0.0, u0);
        PhaseState state{u0, std::move(hist)};
        std::optional<PhaseState> s1, s2;
        const int n_steps = static_cast<int>(std::ceil(t2 / cfg.dt - 1e-9));
        for (int i = 0; i < n_steps; ++i) {
            const double t = i * cfg.dt;
            if (!s1 && t >= t1 - 1e-12) s1 = state;
            SpectralField next = step(state, disc);
            state.history.push(t + cfg.dt, next);
            state.v = std::move(next);
        }
        s2 = state;
        if (!s1) s1 = state;
        return MemberResult{std::move(*s1), std::move(*s2)};
    };

    // Members are independent; run them concurrently.
    std::vector<std::future<MemberResult>> futures;
    futures.reserve(n_members);
    for (int i = 0; i < n_members; ++i)
        futures.push_back(std::async(std::launch::async, run_member,
                                     seed + 1000ull * (i + 1)));
    std::vector<MemberResult> members;
    members.reserve(n_members);
    for (auto& f : futures) members.push_back(f.get());

    ProbeReport rep;
    for (int i = 0; i < n_members; ++i) {
        rep.max_terminal_norm =
            std::max(rep.max_terminal_norm, members[i].slice2.v.l2_norm());
        for (int j = i + 1; j < n_members; ++j)
            rep.terminal_diameter =
                std::max(rep.terminal_diameter,
                         h_distance(members[i].slice2, members[j].slice2, tq));
    }
    // Hausdorff semidistance from the t1-slice to the t2-slice of the
    // ensemble, in the discrete H-norm.
    for (int i = 0; i < n_members; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n_members; ++j)
            best = std::min(best,
                            h_distance(members[i].slice1, members[j].slice2, tq));
        rep.hausdorff_shift = std::max(rep.hausdorff_shift, best);
    }
    return rep;
}

} // namespace dpde
