#pragma once

#include "dpde/kernels.hpp"
#include "dpde/phase.hpp"
#include "dpde/spectral.hpp"

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <string>
#include <vector>

namespace dpde {

// Birth-rate nonlinearity b with its declared bound C_b and Lipschitz L_b.
struct Nonlinearity {
    enum class Family {
        Zero,         // b == 0
        NicholsonAbs, // p |w| e^{-|w|}  (bounded, positive off zero)
        NicholsonRaw, // p w e^{-w}      (unbounded for w < 0; positive data only)
        ScaledTanh,   // p tanh(w)
        Linear,       // p w, clipped to |b| <= bound (bound = clip level)
    };
    Family family = Family::Zero;
    double p = 1.0;
    double clip = 1.0; // Linear only

    double operator()(double w) const;
    double bound() const;     // C_b (NicholsonRaw reports the w >= 0 bound)
    double lipschitz() const; // L_b

    nlohmann::json describe() const;
    static Nonlinearity from_json(const nlohmann::json& j);
};

// Spatial interaction kernel f on (-L, L).
struct SpatialKernel {
    enum class Family {
        Constant, // f == value
        Gaussian, // exp(-s^2 / (4 alpha)) / sqrt(4 pi alpha)
    };
    Family family = Family::Constant;
    double value = 1.0; // Constant
    double alpha = 0.05; // Gaussian

    double operator()(double s) const;
    double bound() const; // M_f

    nlohmann::json describe() const;
    static SpatialKernel from_json(const nlohmann::json& j);
};

struct ModelConfig {
    double L = 1.0;
    int m = 16;
    int quad_order = 64;
    double d = 1.0; // damping, > 0
    double r = 1.0; // delay horizon, > 0
    double dt = 1.0 / 256.0;
    int theta_panels = 64;
    Nonlinearity b;
    SpatialKernel f;
    KernelPtr kernel;

    void validate() const; // throws ConfigError on violated invariants
    // k1 = C_b^2 M_f^2 |Omega|^2 C^2, with C an upper bound for the
    // (-1/2)-integral of the delay kernel.
    double energy_rate_constant(double c_minus_half) const;
};

// Precomputed discrete operators for one model: basis, theta rule and the
// f(x - y) interaction matrix on the spatial quadrature grid.
class Discretization {
public:
    explicit Discretization(const ModelConfig& cfg);

    const ModelConfig& config() const { return cfg_; }
    const Basis& basis() const { return basis_; }
    const ThetaQuad& theta_quad() const { return tq_; }

    // The delay term F(u_t) of the right-hand side, projected on e_1..e_m.
    SpectralField eval_F(const PhaseState& state) const;

private:
    ModelConfig cfg_;
    Basis basis_;
    ThetaQuad tq_;
    std::vector<double> fmat_; // row-major f(x_i - y_j) * w_y_j
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SpectralField> fields;
    std::vector<double> norm_l2;     // ||u(t)||
    std::vector<double> norm_h1;     // ||A^{1/2} u(t)||
    std::vector<double> inner_F_u;   // <F(u_t), u(t)> at each step start
    std::vector<double> f_minus_half; // ||F(u_t)||_{-1/2}
};

// One exponential-integrator step with F frozen at the step start:
//   g_k(t+dt) = e^{-(lambda_k + d) dt} g_k(t)
//             + (1 - e^{-(lambda_k + d) dt}) / (lambda_k + d) * F_k(t).
SpectralField step(const PhaseState& state, const Discretization& disc);

// phi gives the history on [-r, 0); u(0) = u0 regardless of phi(0-).
using HistoryFn = std::function<SpectralField(double)>;

Trajectory simulate(const Discretization& disc, const SpectralField& u0,
                    const HistoryFn& phi, double T);

void write_trajectory_csv(const Trajectory& traj, const std::string& path);

} // namespace dpde
