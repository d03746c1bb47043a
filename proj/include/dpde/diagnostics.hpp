#pragma once

#include "dpde/solver.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>

namespace dpde {

// Reduced scalar delay ODE
//   y'(t) = -a y(t) + gain * chi_const * int_{t-r}^{t} B(y(s)) ds,
// the m = 1, constant-kernel reduction of the Galerkin system.  Only a
// constant temporal weight is supported; that is the configuration the
// solver is validated against.
struct ReducedDelayOde {
    double a = 0.0;
    double r = 1.0;
    double chi_const = 1.0;
    double gain = 1.0;
    std::function<double(double)> feedback; // B(y)
};

struct DenseSolution {
    double t0 = 0.0; // first grid time
    double h = 0.0;
    std::vector<double> y; // y(t0 + i h)

    double at(double t) const; // linear interpolation
};

// Method of steps with RK4 substeps of size h; the window integral is a
// running trapezoid sum on the same grid.  phi gives history on [-r, 0).
DenseSolution method_of_steps_oracle(const ReducedDelayOde& ode,
                                     const std::function<double(double)>& phi,
                                     double y0, double T, double h);

// Constants entering the paper-style certificates, taken from declared or
// measured kernel bounds.
struct CertifiedConstants {
    double c_b = 0.0;
    double m_f = 0.0;
    double omega = 0.0; // |Omega| = L
    double c_minus_half = 0.0;
    double c_zero = 0.0;

    double k1() const; // C_b^2 M_f^2 |Omega|^2 C_{xi,-1/2}^2
};

struct AuditReport {
    double energy_margin_min = 0.0; // min_t [ ||u0||^2 + k1 t - chi(t) ]
    double weak_bound_margin_min = 0.0;   // C_b M_f |O| C_{-1/2} ||A^1/2 u|| - |<F,u>|
    double strong_bound_margin_min = 0.0; // C_b M_f |O| C_0 ||u|| - |<F,u>|
    bool pass = false;
    nlohmann::json to_json() const;
};

AuditReport audit_certificates(const Trajectory& traj, const ModelConfig& cfg,
                               const CertifiedConstants& c,
                               double tol = 1e-6);

struct RadiusEntry {
    double radius = 0.0;
    std::optional<double> entry_time; // empty: inconclusive before T_max
    double max_after_entry = 0.0;     // max ||u||^2 after entry
    bool stayed_inside = false;       // never beyond 1.10 x threshold
};

struct DissipativityReport {
    double threshold = 0.0; // 1.05 * k1 / (lambda_1 + 2d), squared-norm level
    std::vector<RadiusEntry> entries;
    bool pass = false;
    nlohmann::json to_json() const;
};

DissipativityReport dissipativity_probe(const Discretization& disc,
                                        const CertifiedConstants& c,
                                        const std::vector<double>& radii,
                                        double T_max, uint64_t seed);

struct ProbeReport {
    double terminal_diameter = 0.0; // max pairwise h-distance at the end
    double hausdorff_shift = 0.0;   // semidistance, slice(T_obs) -> slice(2 T_obs)
    double max_terminal_norm = 0.0;
    bool pass = true;
    nlohmann::json to_json() const;
};

ProbeReport attractor_probe(const Discretization& disc, int n_members,
                            double T_transient, double T_observe,
                            double init_radius, uint64_t seed);

} // namespace dpde
