#pragma once

#include "dpde/phase.hpp"
#include "dpde/spectral.hpp"

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace dpde {

// Temporal weight chi on [-r, 0].  Construction computes I = int chi and
// int |chi| on a dense grid and rejects |I| < 1e-12 (a usable chi must have
// nonvanishing mean).
class TimeProfile {
public:
    enum class Family { Constant, GaussianBump, SignedPair };

    static TimeProfile constant(double r, double value);
    // exp(-(theta - center)^2 / (2 width^2)), center in (-r, 0).
    static TimeProfile gaussian_bump(double r, double center, double width);
    // Sign-changing: gaussian at c1 minus `ratio` times gaussian at c2.
    static TimeProfile signed_pair(double r, double c1, double c2,
                                   double width, double ratio);

    double operator()(double theta) const { return fn_(theta); }
    double r() const { return r_; }
    double integral() const { return integral_; }
    double abs_integral() const { return abs_integral_; }

    Family family() const { return family_; }
    const std::vector<double>& params() const { return params_; }
    nlohmann::json describe() const;
    static TimeProfile from_json(const nlohmann::json& j);

private:
    TimeProfile(double r, Family fam, std::vector<double> params,
                std::function<double(double)> fn);
    double r_;
    Family family_;
    std::vector<double> params_;
    std::function<double(double)> fn_;
    double integral_ = 0.0;
    double abs_integral_ = 0.0;
};

// Declared a-priori constants a kernel promises to stay under.
struct KernelBounds {
    double c_minus_half = 0.0; // int ||xi(theta)||_{-1/2} dtheta
    double c_zero = 0.0;       // int ||xi(theta)||_{0} dtheta
    double ess_sup = 0.0;      // ess-sup_theta ||xi(theta)||_{-1/2}
    double lipschitz = 0.0;    // state-Lipschitz constant in the H metric
};

// The state-dependent delay rule: (theta, state) -> x-profile in spectral
// coefficients.  eval must be pure and deterministic.
class DelayKernel {
public:
    virtual ~DelayKernel() = default;
    virtual SpectralField eval(double theta, const PhaseState& state,
                               const Basis& basis) const = 0;
    virtual std::optional<KernelBounds> declared_bounds() const { return std::nullopt; }
    virtual nlohmann::json describe() const = 0;
    virtual std::string family() const = 0;
};

using KernelPtr = std::shared_ptr<const DelayKernel>;

// xi(theta, x) = chi(theta) * profile(x), independent of the state.
KernelPtr make_constant_in_state(SpectralField profile, TimeProfile chi,
                                 const Basis& basis);

// xi(theta, x, v, psi) = bump_sigma(theta + tau(||v||)) * profile(x) with
// tau(s) = tau_min + (tau_max - tau_min) * s / (1 + s).  The bump is the
// standard C-infinity compact bump on (-sigma, sigma), normalized to unit
// mass; requires [tau_min - sigma, tau_max + sigma] inside [0, r].
KernelPtr make_delay_selective(double r, double tau_min, double tau_max,
                               double sigma, SpectralField profile,
                               const Basis& basis);

KernelPtr zero_kernel(int modes);

// Normalized compact bump, unit mass, support (-sigma, sigma).
double bump(double s, double sigma);
double bump_peak(double sigma); // max value

// ---- numeric certification of the kernel hypotheses ---------------------

struct CertificateReport {
    double c_minus_half = 0.0;
    double c_zero = 0.0;
    double ess_sup = 0.0;
    double lipschitz = 0.0;
    std::optional<KernelBounds> declared;
    bool pass = true; // measured <= declared (when declared present)
    nlohmann::json to_json() const;
};

// Random phase states in the ball h_norm <= radius (uniform direction,
// radius^ (1/2)-biased magnitude), deterministic in the seed.
std::vector<PhaseState> sample_states(const Basis& basis, const ThetaQuad& tq,
                                      int count, double radius, uint64_t seed);

double certify_bound_minus_half(const DelayKernel& k,
                                const std::vector<PhaseState>& states,
                                const ThetaQuad& tq, const Basis& basis);
double certify_bound_zero(const DelayKernel& k,
                          const std::vector<PhaseState>& states,
                          const ThetaQuad& tq, const Basis& basis);
double certify_ess_sup(const DelayKernel& k,
                       const std::vector<PhaseState>& states,
                       const std::vector<double>& theta_grid, const Basis& basis);
double estimate_lipschitz(const DelayKernel& k, double radius, int n_pairs,
                          uint64_t seed, const Basis& basis, const ThetaQuad& tq);

// Runs all four certifications and compares against declared bounds.
CertificateReport certify_kernel(const DelayKernel& k, const Basis& basis,
                                 const ThetaQuad& tq, int n_states,
                                 double radius, uint64_t seed);

} // namespace dpde
