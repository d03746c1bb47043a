#pragma once

#include "dpde/spectral.hpp"

#include <deque>

namespace dpde {

// Quadrature rule on [-r, 0] for history integrals.  Composite Simpson with
// nodes at both endpoints, so kernels concentrated near theta = -r are seen
// and constants integrate exactly.
struct ThetaQuad {
    double r = 0.0;
    std::vector<double> nodes;   // in [-r, 0], increasing
    std::vector<double> weights; // sum to r
};

// `panels` composite Simpson panels (rounded up to even), panels+1 nodes.
ThetaQuad make_theta_quad(double r, int panels);

// Time-stamped fields spanning at least [t_now - r, t_now].  Piecewise-linear
// interpolation in time, exact at stored nodes.  Entries older than the delay
// window (plus a small slack) are evicted from the front.
class HistorySegment {
public:
    HistorySegment(double r, int modes);

    double delay() const { return r_; }
    int modes() const { return modes_; }
    double t_now() const;
    bool covers_window() const;

    // Appends at time t, which must be strictly after the last entry.
    void push(double t, SpectralField u);

    // u(t_now + theta), theta in [-r, 0].
    SpectralField sample(double theta) const;
    SpectralField at_time(double t) const;

    size_t size() const { return entries_.size(); }

private:
    struct Entry {
        double t;
        SpectralField u;
    };
    double r_;
    int modes_;
    std::deque<Entry> entries_;
};

// Constant-in-time history equal to u on [t0 - r, t0].
HistorySegment constant_history(double r, const SpectralField& u, double t0 = 0.0);

// Phase coordinate (u(t), u_t) in H = L2 x L2(-r, 0; L2).
struct PhaseState {
    SpectralField v;
    HistorySegment history;
};

// sqrt(||v||^2 + int_{-r}^0 ||psi(s)||^2 ds) with the theta rule.
double h_norm(const PhaseState& s, const ThetaQuad& tq);
double h_distance(const PhaseState& a, const PhaseState& b, const ThetaQuad& tq);

// Distance to a stationary state (v*, const-history v*), avoiding a segment
// allocation for the comparison point.
double h_distance_to_constant(const PhaseState& s, const SpectralField& target,
                              const ThetaQuad& tq);

} // namespace dpde
