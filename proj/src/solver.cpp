#include "dpde/solver.hpp"

#include "dpde/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

namespace dpde {

// ---- Nonlinearity --------------------------------------------------------

double Nonlinearity::operator()(double w) const {
    switch (family) {
        case Family::Zero: return 0.0;
        case Family::NicholsonAbs: return p * std::abs(w) * std::exp(-std::abs(w));
        case Family::NicholsonRaw: return p * w * std::exp(-w);
        case Family::ScaledTanh: return p * std::tanh(w);
        case Family::Linear: {
            double v = p * w;
            return std::clamp(v, -clip, clip);
        }
    }
    return 0.0;
}

double Nonlinearity::bound() const {
    switch (family) {
        case Family::Zero: return 0.0;
        case Family::NicholsonAbs: return p / std::exp(1.0);
        case Family::NicholsonRaw: return p / std::exp(1.0); // valid on w >= 0 only
        case Family::ScaledTanh: return p;
        case Family::Linear: return clip;
    }
    return 0.0;
}

double Nonlinearity::lipschitz() const {
    switch (family) {
        case Family::Zero: return 0.0;
        case Family::NicholsonAbs: return p;
        case Family::NicholsonRaw: return p; // local (w >= 0)
        case Family::ScaledTanh: return p;
        case Family::Linear: return p;
    }
    return 0.0;
}

namespace {
const char* nl_name(Nonlinearity::Family f) {
    switch (f) {
        case Nonlinearity::Family::Zero: return "zero";
        case Nonlinearity::Family::NicholsonAbs: return "nicholson_abs";
        case Nonlinearity::Family::NicholsonRaw: return "nicholson_raw";
        case Nonlinearity::Family::ScaledTanh: return "scaled_tanh";
        case Nonlinearity::Family::Linear: return "linear";
    }
    return "?";
}
} // namespace

nlohmann::json Nonlinearity::describe() const {
    return {{"family", nl_name(family)}, {"p", p}, {"clip", clip}};
}

Nonlinearity Nonlinearity::from_json(const nlohmann::json& j) {
    Nonlinearity b;
    const std::string f = j.at("family");
    if (f == "zero") b.family = Family::Zero;
    else if (f == "nicholson_abs") b.family = Family::NicholsonAbs;
    else if (f == "nicholson_raw") b.family = Family::NicholsonRaw;
    else if (f == "scaled_tanh") b.family = Family::ScaledTanh;
    else if (f == "linear") b.family = Family::Linear;
    else throw ConfigError("unknown nonlinearity family: " + f);
    b.p = j.value("p", 1.0);
    b.clip = j.value("clip", 1.0);
    return b;
}

// ---- SpatialKernel -------------------------------------------------------

double SpatialKernel::operator()(double s) const {
    if (family == Family::Constant) return value;
    return std::exp(-s * s / (4.0 * alpha)) / std::sqrt(4.0 * M_PI * alpha);
}

double SpatialKernel::bound() const {
    if (family == Family::Constant) return std::abs(value);
    return 1.0 / std::sqrt(4.0 * M_PI * alpha);
}

nlohmann::json SpatialKernel::describe() const {
    if (family == Family::Constant)
        return {{"family", "constant"}, {"value", value}};
    return {{"family", "gaussian"}, {"alpha", alpha}};
}

SpatialKernel SpatialKernel::from_json(const nlohmann::json& j) {
    SpatialKernel f;
    const std::string fam = j.at("family");
    if (fam == "constant") {
        f.family = Family::Constant;
        f.value = j.value("value", 1.0);
    } else if (fam == "gaussian") {
        f.family = Family::Gaussian;
        f.alpha = j.value("alpha", 0.05);
    } else {
        throw ConfigError("unknown spatial kernel family: " + fam);
    }
    return f;
}

// ---- ModelConfig ---------------------------------------------------------

void ModelConfig::validate() const {
    if (L <= 0.0) throw ConfigError("L must be positive");
    if (m < 1) throw ConfigError("m must be >= 1");
    if (quad_order < 4 * m) throw ConfigError("quad_order must be >= 4m");
    if (d <= 0.0) throw ConfigError("d must be positive");
    if (r <= 0.0) throw ConfigError("r must be positive");
    if (dt <= 0.0) throw ConfigError("dt must be positive");
    if (dt > r / 4.0 + 1e-15) throw ConfigError("dt must be <= r/4");
    if (!kernel) throw ConfigError("no delay kernel configured");
    // Spot-check the declared nonlinearity bound.  NicholsonRaw is only
    // bounded on w >= 0, so the sweep stays there for it.
    const double lo = b.family == Nonlinearity::Family::NicholsonRaw ? 0.0 : -50.0;
    for (int i = 0; i <= 2000; ++i) {
        double w = lo + i * (50.0 - lo) / 2000.0;
        if (std::abs(b(w)) > b.bound() * (1.0 + 1e-12))
            throw ConfigError("nonlinearity exceeds its declared bound C_b");
    }
    for (int i = 0; i <= 2000; ++i) {
        double s = -L + i * 2.0 * L / 2000.0;
        if (std::abs(f(s)) > f.bound() * (1.0 + 1e-12))
            throw ConfigError("spatial kernel exceeds its declared bound M_f");
    }
}

double ModelConfig::energy_rate_constant(double c_minus_half) const {
    const double c = b.bound() * f.bound() * L * c_minus_half;
    return c * c;
}

// ---- Discretization ------------------------------------------------------

Discretization::Discretization(const ModelConfig& cfg)
    : cfg_(cfg), basis_(build_basis(cfg.L, cfg.m, cfg.quad_order)),
      tq_(make_theta_quad(cfg.r, cfg.theta_panels)) {
    cfg_.validate();
    const size_t n = basis_.quad_nodes.size();
    double wsum = 0.0;
    for (double w : basis_.quad_weights) wsum += w;
    if (std::abs(wsum - cfg.L) > 1e-10 * cfg.L)
        throw ConfigError("spatial quadrature weights do not sum to |Omega| = L");
    fmat_.resize(n * n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            fmat_[i * n + j] =
                cfg_.f(basis_.quad_nodes[i] - basis_.quad_nodes[j]) *
                basis_.quad_weights[j];
}

SpectralField Discretization::eval_F(const PhaseState& state) const {
    if (!state.history.covers_window())
        throw InvalidState("eval_F: history does not cover [t - r, t]");
    const size_t n = basis_.quad_nodes.size();
    std::vector<double> acc(n, 0.0);
    std::vector<double> bw(n), inner(n);
    for (size_t j = 0; j < tq_.nodes.size(); ++j) {
        const double theta = tq_.nodes[j];
        SpectralField past = state.history.sample(theta);
        std::vector<double> uvals = evaluate_on_grid(past, basis_);
        for (size_t q = 0; q < n; ++q) bw[q] = cfg_.b(uvals[q]);
        for (size_t i = 0; i < n; ++i) {
            double s = 0.0;
            const double* row = &fmat_[i * n];
            for (size_t q = 0; q < n; ++q) s += row[q] * bw[q];
            inner[i] = s;
        }
        SpectralField xi = cfg_.kernel->eval(theta, state, basis_);
        std::vector<double> xvals = evaluate_on_grid(xi, basis_);
        const double wt = tq_.weights[j];
        for (size_t i = 0; i < n; ++i) acc[i] += wt * inner[i] * xvals[i];
    }
    return project(acc, basis_);
}

SpectralField step(const PhaseState& state, const Discretization& disc) {
    const ModelConfig& cfg = disc.config();
    const Basis& basis = disc.basis();
    SpectralField F = disc.eval_F(state);
    if (!F.finite())
        throw BlowupError("non-finite delay term", state.history.t_now());
    SpectralField next = zero_field(cfg.m);
    for (int k = 0; k < cfg.m; ++k) {
        const double a = basis.lambda[k] + cfg.d;
        const double e = std::exp(-a * cfg.dt);
        next.coeffs[k] = e * state.v.coeffs[k] + (1.0 - e) / a * F.coeffs[k];
    }
    if (!next.finite())
        throw BlowupError("non-finite state after step", state.history.t_now());
    return next;
}

Trajectory simulate(const Discretization& disc, const SpectralField& u0,
                    const HistoryFn& phi, double T) {
    const ModelConfig& cfg = disc.config();
    const Basis& basis = disc.basis();
    if (T <= 0.0) throw ConfigError("simulation horizon must be positive");
    if (u0.modes() != cfg.m) throw InvalidInput("u0 has wrong mode count");

    const int hist_steps = static_cast<int>(std::round(cfg.r / cfg.dt));
    HistorySegment hist(cfg.r, cfg.m);
    for (int j = 0; j < hist_steps; ++j) {
        const double t = -cfg.r + j * cfg.dt;
        SpectralField ph = phi(t);
        if (ph.modes() != cfg.m) throw InvalidInput("phi has wrong mode count");
        hist.push(t, std::move(ph));
    }
    hist.push(0.0, u0);

    PhaseState state{u0, std::move(hist)};
    Trajectory traj;
    const int n_steps = static_cast<int>(std::ceil(T / cfg.dt - 1e-9));

    auto record = [&](double t, const SpectralField& F) {
        traj.times.push_back(t);
        traj.fields.push_back(state.v);
        traj.norm_l2.push_back(state.v.l2_norm());
        traj.norm_h1.push_back(fractional_norm(state.v, 0.5, basis));
        double fu = 0.0;
        for (int k = 0; k < cfg.m; ++k) fu += F.coeffs[k] * state.v.coeffs[k];
        traj.inner_F_u.push_back(fu);
        traj.f_minus_half.push_back(fractional_norm(F, -0.5, basis));
    };

    for (int i = 0; i < n_steps; ++i) {
        const double t = i * cfg.dt;
        SpectralField F = disc.eval_F(state);
        if (!F.finite()) throw BlowupError("non-finite delay term", t);
        record(t, F);
        SpectralField next = zero_field(cfg.m);
        for (int k = 0; k < cfg.m; ++k) {
            const double a = basis.lambda[k] + cfg.d;
            const double e = std::exp(-a * cfg.dt);
            next.coeffs[k] = e * state.v.coeffs[k] + (1.0 - e) / a * F.coeffs[k];
        }
        if (!next.finite()) throw BlowupError("non-finite state", t + cfg.dt);
        state.history.push(t + cfg.dt, next);
        state.v = std::move(next);
    }
    SpectralField F = disc.eval_F(state);
    record(n_steps * cfg.dt, F);
    return traj;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open " + path + " for writing");
    const int m = traj.fields.empty() ? 0 : traj.fields.front().modes();
    out << "t, norm_l2, norm_h1";
    for (int k = 1; k <= m; ++k) out << ", c" << k;
    out << "\n";
    char buf[32];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    };
    for (size_t i = 0; i < traj.times.size(); ++i) {
        emit(traj.times[i]);
        out << ", ";
        emit(traj.norm_l2[i]);
        out << ", ";
        emit(traj.norm_h1[i]);
        for (int k = 0; k < m; ++k) {
            out << ", ";
            emit(traj.fields[i].coeffs[k]);
        }
        out << "\n";
    }
}

} // namespace dpde
