#pragma once

#include <span>
#include <vector>

namespace dpde {

// Dirichlet-Laplacian eigenbasis on (0, L):
//   e_k(x) = sqrt(2/L) sin(k pi x / L),  lambda_k = (k pi / L)^2,  k = 1..m.
// All spatial integrals share one Gauss-Legendre rule on (0, L); the rule
// must have >= 4m nodes so products of basis functions integrate near-exactly.
struct Basis {
    double L = 1.0;
    int m = 0;
    std::vector<double> lambda;       // strictly increasing, positive
    std::vector<double> quad_nodes;   // in (0, L)
    std::vector<double> quad_weights; // sum to L

    double eigenfunction(int k, double x) const; // k = 1..m
};

// Coefficient vector in the eigenbasis.  Parseval: ||u||^2 = sum c_k^2.
struct SpectralField {
    std::vector<double> coeffs;

    int modes() const { return static_cast<int>(coeffs.size()); }
    bool finite() const;

    double l2_norm() const;

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double a);
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double a, SpectralField f);

SpectralField zero_field(int m);

// Gauss-Legendre nodes/weights on (a, b).
void gauss_legendre(int n, double a, double b,
                    std::vector<double>& nodes, std::vector<double>& weights);

Basis build_basis(double L, int m, int quad_order);

// Projection of point samples (given on the basis quadrature nodes) onto
// span{e_1..e_m}.  project(evaluate(u)) == u for u already in the span.
SpectralField project(std::span<const double> samples, const Basis& basis);

// ||A^s u|| = (sum lambda_k^{2s} c_k^2)^{1/2}; s in [-1, 1], s = 0 is L2.
double fractional_norm(const SpectralField& u, double s, const Basis& basis);

// c_k -> lambda_k c_k.
SpectralField apply_A(const SpectralField& u, const Basis& basis);

std::vector<double> evaluate(const SpectralField& u,
                             std::span<const double> points, const Basis& basis);
double evaluate_at(const SpectralField& u, double x, const Basis& basis);

// Samples of u on the basis quadrature nodes.
std::vector<double> evaluate_on_grid(const SpectralField& u, const Basis& basis);

} // namespace dpde
