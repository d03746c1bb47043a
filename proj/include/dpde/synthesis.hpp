#pragma once

#include "dpde/kernels.hpp"
#include "dpde/solver.hpp"

#include <nlohmann/json_fwd.hpp>

namespace dpde {

// A prescribed stationary solution, with the temporal weight used for its
// kernel slice.  The zero equilibrium needs no spec: the synthesized kernel
// vanishes away from all targets, so (0, 0) is stationary whenever b(0) = 0.
struct EquilibriumSpec {
    SpectralField u_st; // nonzero, in the m-mode span
    TimeProfile chi;
};

// p(x) = int_Omega b(u_st(y)) f(x - y) dy on the spatial grid, with the
// minimum value and a finite-difference bound on |p'|.
struct PFunction {
    std::vector<double> values; // on basis.quad_nodes
    double p_min = 0.0;
    double p_prime_max = 0.0;
};

PFunction compute_p(const SpectralField& u_st, const Nonlinearity& b,
                    const SpatialKernel& f, const Basis& basis);

// v_hat(x) = (A u_st + d u_st)(x) / (p(x) * int chi), projected on the basis.
SpectralField synthesize_vhat(const SpectralField& u_st, double d,
                              const PFunction& p, const TimeProfile& chi,
                              const Basis& basis);

// Kernel with xi = sum_k w_k(state) chi_k(theta) vhat_k(x), where w_k is a
// linear ramp on the h-distance to the k-th target, 1 at the target and 0
// outside its rho-ball.  Balls must be pairwise disjoint.
KernelPtr build_stationary_kernel(const std::vector<EquilibriumSpec>& specs,
                                  double rho, double d, const Nonlinearity& b,
                                  const SpatialKernel& f, const Basis& basis,
                                  const ThetaQuad& tq);

struct StationaryReport {
    double residual = 0.0;  // ||A u_st + d u_st - F(eq state)||_{-1/2}
    double max_drift = 0.0; // sup_{t <= T} ||u(t) - u_st|| from the target
    bool pass = false;
};

StationaryReport verify_stationary(const Discretization& disc,
                                   const SpectralField& u_st, double T,
                                   double residual_tol, double drift_tol);

// Deserializes any kernel family, including synthesized artifacts.
KernelPtr kernel_from_json(const nlohmann::json& j, const Basis& basis,
                           const ThetaQuad& tq);

} // namespace dpde
