#include <doctest.h>

#include "dpde/errors.hpp"
#include "dpde/kernels.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>

using namespace dpde;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralField mode_field(int mode, double amp, int m) {
    SpectralField f = zero_field(m);
    f.coeffs[mode - 1] = amp;
    return f;
}

// Dense Simpson oracle, independent of the library's internal rule.
double simpson(const std::function<double(double)>& f, double a, double b,
               int panels) {
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i)
        acc += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
    return acc * h / 3.0;
}

} // namespace

TEST_CASE("bump: unit mass, compact support, symmetry, peak") {
    for (double sigma : {0.125, 0.3, 1.0}) {
        const double mass = simpson([&](double s) { return bump(s, sigma); },
                                    -sigma, sigma, 20000);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(bump(sigma, sigma) == 0.0);
        CHECK(bump(-sigma, sigma) == 0.0);
        CHECK(bump(2.0 * sigma, sigma) == 0.0);
        CHECK(bump(0.3 * sigma, sigma) ==
              doctest::Approx(bump(-0.3 * sigma, sigma)).epsilon(1e-15));
        CHECK(bump(0.0, sigma) == doctest::Approx(bump_peak(sigma)).epsilon(1e-15));
        CHECK(bump_peak(sigma) > 1.0 / (2.0 * sigma)); // sharper than uniform
    }
    // scaling: peak ~ 1/sigma
    CHECK(bump_peak(0.1) == doctest::Approx(10.0 * bump_peak(1.0)).epsilon(1e-13));
}

TEST_CASE("TimeProfile: integrals against closed forms") {
    TimeProfile c = TimeProfile::constant(2.0, 1.5);
    CHECK(c.integral() == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(c.abs_integral() == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(c(-1.3) == 1.5);

    // Gaussian bump: int exp(-z^2/2) over [-r,0], oracle via erf.
    const double center = -0.5, width = 0.1, r = 1.0;
    TimeProfile g = TimeProfile::gaussian_bump(r, center, width);
    auto erf_int = [&](double a, double b) {
        auto z = [&](double t) { return (t - center) / (width * std::sqrt(2.0)); };
        return width * std::sqrt(kPi / 2.0) * (std::erf(z(b)) - std::erf(z(a)));
    };
    CHECK(g.integral() == doctest::Approx(erf_int(-r, 0.0)).epsilon(1e-9));
    CHECK(g.abs_integral() == doctest::Approx(g.integral()).epsilon(1e-12));

    // signed pair integrates to the difference of the two bumps
    TimeProfile s = TimeProfile::signed_pair(1.0, -0.7, -0.2, 0.05, 0.5);
    const double direct = simpson([&](double t) { return s(t); }, -1.0, 0.0, 40000);
    CHECK(s.integral() == doctest::Approx(direct).epsilon(1e-9));
    CHECK(s.abs_integral() > std::abs(s.integral())); // genuinely sign-changing
}

TEST_CASE("TimeProfile: vanishing-mean chi rejected (Achi)") {
    CHECK_THROWS_AS(TimeProfile::constant(1.0, 0.0), ConfigError);
    // perfectly antisymmetric signed pair: integral cancels
    CHECK_THROWS_AS(TimeProfile::signed_pair(1.0, -0.6, -0.4, 0.05, 1.0),
                    ConfigError);
    CHECK_THROWS_AS(TimeProfile::gaussian_bump(1.0, -0.5, -0.1), ConfigError);
    CHECK_THROWS_AS(TimeProfile::constant(-1.0, 1.0), ConfigError);
}

TEST_CASE("TimeProfile: describe/from_json round trip") {
    TimeProfile g = TimeProfile::gaussian_bump(1.5, -0.4, 0.2);
    TimeProfile back = TimeProfile::from_json(g.describe());
    CHECK(back.family() == TimeProfile::Family::GaussianBump);
    CHECK(back.r() == g.r());
    CHECK(back.integral() == doctest::Approx(g.integral()).epsilon(1e-14));
    for (double th : {-1.2, -0.7, -0.1})
        CHECK(back(th) == doctest::Approx(g(th)).epsilon(1e-15));
}

TEST_CASE("zero kernel: evaluates to zero and certifies trivially") {
    Basis basis = build_basis(1.0, 4, 16);
    ThetaQuad tq = make_theta_quad(1.0, 16);
    KernelPtr k = zero_kernel(4);
    auto states = sample_states(basis, tq, 10, 1.0, 3);
    CHECK(k->eval(-0.5, states[0], basis).l2_norm() == 0.0);
    CertificateReport rep = certify_kernel(*k, basis, tq, 10, 1.0, 3);
    CHECK(rep.c_minus_half == 0.0);
    CHECK(rep.c_zero == 0.0);
    CHECK(rep.ess_sup == 0.0);
    CHECK(rep.lipschitz == 0.0);
    CHECK(rep.pass);
}

TEST_CASE("constant-in-state kernel: closed-form bounds for xi = 1 x e1") {
    // xi(theta, x) = e_1(x) on r = 1:
    //   C_{-1/2} = r * ||e1||_{-1/2} = 1/pi,  C_0 = r,  ess-sup = 1/pi.
    Basis basis = build_basis(1.0, 4, 16);
    ThetaQuad tq = make_theta_quad(1.0, 32);
    KernelPtr k = make_constant_in_state(mode_field(1, 1.0, 4),
                                         TimeProfile::constant(1.0, 1.0), basis);
    auto states = sample_states(basis, tq, 20, 2.0, 11);
    CHECK(certify_bound_minus_half(*k, states, tq, basis) ==
          doctest::Approx(1.0 / kPi).epsilon(1e-12));
    CHECK(certify_bound_zero(*k, states, tq, basis) ==
          doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> grid{-1.0, -0.5, -0.25, 0.0};
    CHECK(certify_ess_sup(*k, states, grid, basis) ==
          doctest::Approx(1.0 / kPi).epsilon(1e-12));
    // state-independent: Lipschitz constant measures as zero
    CHECK(estimate_lipschitz(*k, 1.0, 20, 5, basis, tq) == 0.0);
}

TEST_CASE("constant-in-state kernel: constant x-profile reaches 1/sqrt(12)") {
    // Project u == 1 on many modes; ||1||_{-1/2} -> 1/sqrt(12).
    Basis basis = build_basis(1.0, 64, 256);
    ThetaQuad tq = make_theta_quad(1.0, 32);
    std::vector<double> ones(basis.quad_nodes.size(), 1.0);
    SpectralField profile = project(ones, basis);
    KernelPtr k = make_constant_in_state(profile, TimeProfile::constant(1.0, 1.0),
                                         basis);
    auto states = sample_states(basis, tq, 5, 1.0, 2);
    CHECK(certify_bound_minus_half(*k, states, tq, basis) ==
          doctest::Approx(1.0 / std::sqrt(12.0)).epsilon(1e-7));
}

TEST_CASE("constant-in-state kernel: separable factorization") {
    // measured C_{-1/2} should equal (theta-rule sum of |chi|) * ||profile||_{-1/2}
    Basis basis = build_basis(1.0, 8, 32);
    ThetaQuad tq = make_theta_quad(1.0, 64);
    SpectralField profile = mode_field(2, 0.7, 8);
    TimeProfile chi = TimeProfile::gaussian_bump(1.0, -0.5, 0.1);
    KernelPtr k = make_constant_in_state(profile, chi, basis);

    double chi_sum = 0.0;
    for (size_t j = 0; j < tq.nodes.size(); ++j)
        chi_sum += tq.weights[j] * std::abs(chi(tq.nodes[j]));
    const double nmh = fractional_norm(profile, -0.5, basis);

    auto states = sample_states(basis, tq, 10, 1.0, 7);
    const double measured = certify_bound_minus_half(*k, states, tq, basis);
    CHECK(measured == doctest::Approx(chi_sum * nmh).epsilon(1e-12));
    // and the declared bound (dense integral + headroom) dominates it
    CHECK(measured <= k->declared_bounds()->c_minus_half);
}

TEST_CASE("delay-selective kernel: construction guards") {
    Basis basis = build_basis(1.0, 4, 16);
    SpectralField p = mode_field(1, 1.0, 4);
    CHECK_THROWS_AS(make_delay_selective(1.0, 0.2, 0.8, -0.1, p, basis), ConfigError);
    CHECK_THROWS_AS(make_delay_selective(1.0, 0.8, 0.2, 0.1, p, basis), ConfigError);
    CHECK_THROWS_AS(make_delay_selective(1.0, 0.05, 0.8, 0.1, p, basis), ConfigError);
    CHECK_THROWS_AS(make_delay_selective(1.0, 0.2, 0.95, 0.1, p, basis), ConfigError);
}

TEST_CASE("delay-selective kernel: delay law and pointwise values") {
    Basis basis = build_basis(1.0, 4, 16);
    ThetaQuad tq = make_theta_quad(1.0, 32);
    const double tau_min = 0.125, tau_max = 0.875, sigma = 0.125;
    KernelPtr k = make_delay_selective(1.0, tau_min, tau_max, sigma,
                                       mode_field(1, 1.0, 4), basis);

    // zero state: tau = tau_min; peak of the bump sits at theta = -tau_min.
    PhaseState zero{zero_field(4), constant_history(1.0, zero_field(4))};
    SpectralField at_peak = k->eval(-tau_min, zero, basis);
    CHECK(at_peak.coeffs[0] == doctest::Approx(bump_peak(sigma)).epsilon(1e-13));
    CHECK(k->eval(-tau_min - 1.5 * sigma, zero, basis).l2_norm() == 0.0);

    // large state: tau -> tau_max from below; ||v|| = 3 gives s/(1+s) = 3/4.
    PhaseState big{mode_field(1, 3.0, 4), constant_history(1.0, mode_field(1, 3.0, 4))};
    const double tau_big = tau_min + (tau_max - tau_min) * 0.75;
    SpectralField at_big = k->eval(-tau_big, big, basis);
    CHECK(at_big.coeffs[0] == doctest::Approx(bump_peak(sigma)).epsilon(1e-13));

    // discrete theta-integral of the bump stays near unit mass
    double acc = 0.0;
    for (size_t j = 0; j < tq.nodes.size(); ++j)
        acc += tq.weights[j] * k->eval(tq.nodes[j], zero, basis).coeffs[0];
    CHECK(acc == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("delay-selective kernel: measured bounds stay under declared") {
    Basis basis = build_basis(1.0, 8, 32);
    ThetaQuad tq = make_theta_quad(1.0, 32);
    KernelPtr k = make_delay_selective(1.0, 0.125, 0.875, 0.125,
                                       mode_field(1, 1.0, 8), basis);
    CertificateReport rep = certify_kernel(*k, basis, tq, 200, 2.0, 99);
    REQUIRE(rep.declared.has_value());
    CHECK(rep.c_minus_half <= rep.declared->c_minus_half);
    CHECK(rep.c_zero <= rep.declared->c_zero);
    CHECK(rep.ess_sup <= rep.declared->ess_sup);
    CHECK(rep.lipschitz <= rep.declared->lipschitz);
    CHECK(rep.pass);
    // the bounds are not vacuous: measured values land within a factor ~2
    CHECK(rep.c_minus_half > 0.4 * rep.declared->c_minus_half);
    CHECK(rep.ess_sup > 0.9 * rep.declared->ess_sup);
    CHECK(rep.lipschitz > 0.0);
}

TEST_CASE("certification is deterministic in the seed") {
    Basis basis = build_basis(1.0, 4, 16);
    ThetaQuad tq = make_theta_quad(1.0, 16);
    KernelPtr k = make_delay_selective(1.0, 0.2, 0.7, 0.125,
                                       mode_field(1, 0.5, 4), basis);
    CertificateReport a = certify_kernel(*k, basis, tq, 40, 1.5, 1234);
    CertificateReport b = certify_kernel(*k, basis, tq, 40, 1.5, 1234);
    CHECK(a.c_minus_half == b.c_minus_half);
    CHECK(a.c_zero == b.c_zero);
    CHECK(a.ess_sup == b.ess_sup);
    CHECK(a.lipschitz == b.lipschitz);
    CertificateReport c = certify_kernel(*k, basis, tq, 40, 1.5, 4321);
    CHECK(c.c_minus_half != a.c_minus_half); // different sample, different max
}

TEST_CASE("sample_states: respects the radius and the seed") {
    Basis basis = build_basis(1.0, 4, 16);
    ThetaQuad tq = make_theta_quad(1.0, 16);
    auto states = sample_states(basis, tq, 50, 2.0, 17);
    REQUIRE(states.size() == 50);
    for (const auto& s : states) {
        const double n = h_norm(s, tq);
        CHECK(n <= 2.0 + 1e-9);
        CHECK(n > 0.0);
    }
    auto again = sample_states(basis, tq, 50, 2.0, 17);
    for (size_t i = 0; i < 50; ++i)
        CHECK(states[i].v.coeffs[0] == again[i].v.coeffs[0]);
}

TEST_CASE("certify guards: empty sample and bad radius") {
    Basis basis = build_basis(1.0, 2, 8);
    ThetaQuad tq = make_theta_quad(1.0, 8);
    KernelPtr k = zero_kernel(2);
    std::vector<PhaseState> none;
    CHECK_THROWS_AS(certify_bound_minus_half(*k, none, tq, basis), InvalidInput);
    CHECK_THROWS_AS(certify_bound_zero(*k, none, tq, basis), InvalidInput);
    CHECK_THROWS_AS(certify_ess_sup(*k, none, {0.0}, basis), InvalidInput);
    CHECK_THROWS_AS(estimate_lipschitz(*k, -1.0, 4, 0, basis, tq), ConfigError);
}
