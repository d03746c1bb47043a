#include "dpde/spectral.hpp"

#include "dpde/errors.hpp"

#include <cmath>
#include <numbers>

namespace dpde {

namespace {
constexpr double kPi = std::numbers::pi;
}

double Basis::eigenfunction(int k, double x) const {
    return std::sqrt(2.0 / L) * std::sin(k * kPi * x / L);
}

bool SpectralField::finite() const {
    for (double c : coeffs)
        if (!std::isfinite(c)) return false;
    return true;
}

double SpectralField::l2_norm() const {
    double s = 0.0;
    for (double c : coeffs) s += c * c;
    return std::sqrt(s);
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    if (o.coeffs.size() != coeffs.size())
        throw InvalidInput("SpectralField size mismatch in +=");
    for (size_t k = 0; k < coeffs.size(); ++k) coeffs[k] += o.coeffs[k];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    if (o.coeffs.size() != coeffs.size())
        throw InvalidInput("SpectralField size mismatch in -=");
    for (size_t k = 0; k < coeffs.size(); ++k) coeffs[k] -= o.coeffs[k];
    return *this;
}

SpectralField& SpectralField::operator*=(double a) {
    for (double& c : coeffs) c *= a;
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { a += b; return a; }
SpectralField operator-(SpectralField a, const SpectralField& b) { a -= b; return a; }
SpectralField operator*(double a, SpectralField f) { f *= a; return f; }

SpectralField zero_field(int m) {
    SpectralField f;
    f.coeffs.assign(static_cast<size_t>(m), 0.0);
    return f;
}

void gauss_legendre(int n, double a, double b,
                    std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw ConfigError("quadrature order must be >= 1");
    nodes.resize(n);
    weights.resize(n);
    // Newton iteration on Legendre polynomials, symmetric roots on (-1, 1).
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (x * p0 - p1) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
        nodes[i] = mid - hw * x;
        nodes[n - 1 - i] = mid + hw * x;
        weights[i] = hw * w;
        weights[n - 1 - i] = hw * w;
    }
}

Basis build_basis(double L, int m, int quad_order) {
    if (L <= 0.0) throw ConfigError("domain length L must be positive");
    if (m < 1) throw ConfigError("mode count m must be >= 1");
    if (quad_order < 4 * m)
        throw ConfigError("quadrature order must be >= 4m");
    Basis b;
    b.L = L;
    b.m = m;
    b.lambda.resize(m);
    for (int k = 1; k <= m; ++k) {
        double kl = k * kPi / L;
        b.lambda[k - 1] = kl * kl;
    }
    gauss_legendre(quad_order, 0.0, L, b.quad_nodes, b.quad_weights);
    return b;
}

SpectralField project(std::span<const double> samples, const Basis& basis) {
    if (samples.size() != basis.quad_nodes.size())
        throw InvalidInput("project: sample count does not match quadrature rule");
    SpectralField u = zero_field(basis.m);
    for (int k = 1; k <= basis.m; ++k) {
        double c = 0.0;
        for (size_t q = 0; q < samples.size(); ++q)
            c += basis.quad_weights[q] * samples[q] *
                 basis.eigenfunction(k, basis.quad_nodes[q]);
        u.coeffs[k - 1] = c;
    }
    return u;
}

double fractional_norm(const SpectralField& u, double s, const Basis& basis) {
    double acc = 0.0;
    const int m = std::min(u.modes(), basis.m);
    for (int k = 0; k < m; ++k)
        acc += std::pow(basis.lambda[k], 2.0 * s) * u.coeffs[k] * u.coeffs[k];
    return std::sqrt(acc);
}

SpectralField apply_A(const SpectralField& u, const Basis& basis) {
    SpectralField v = u;
    const int m = std::min(u.modes(), basis.m);
    for (int k = 0; k < m; ++k) v.coeffs[k] *= basis.lambda[k];
    return v;
}

double evaluate_at(const SpectralField& u, double x, const Basis& basis) {
    if (x < 0.0 || x > basis.L)
        throw InvalidInput("evaluate: point outside [0, L]");
    double v = 0.0;
    for (int k = 1; k <= u.modes(); ++k)
        v += u.coeffs[k - 1] * basis.eigenfunction(k, x);
    return v;
}

std::vector<double> evaluate(const SpectralField& u,
                             std::span<const double> points, const Basis& basis) {
    std::vector<double> out(points.size());
    for (size_t i = 0; i < points.size(); ++i)
        out[i] = evaluate_at(u, points[i], basis);
    return out;
}

std::vector<double> evaluate_on_grid(const SpectralField& u, const Basis& basis) {
    return evaluate(u, basis.quad_nodes, basis);
}

} // namespace dpde
