#include "dpde/phase.hpp"

#include "dpde/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dpde {

ThetaQuad make_theta_quad(double r, int panels) {
    if (r <= 0.0) throw ConfigError("delay r must be positive");
    if (panels < 2) panels = 2;
    if (panels % 2 != 0) ++panels;
    ThetaQuad tq;
    tq.r = r;
    const int n = panels + 1;
    const double h = r / panels;
    tq.nodes.resize(n);
    tq.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        tq.nodes[i] = -r + i * h;
        double w;
        if (i == 0 || i == n - 1) w = 1.0;
        else if (i % 2 == 1) w = 4.0;
        else w = 2.0;
        tq.weights[i] = w * h / 3.0;
    }
    return tq;
}

HistorySegment::HistorySegment(double r, int modes) : r_(r), modes_(modes) {
    if (r <= 0.0) throw ConfigError("delay r must be positive");
}

double HistorySegment::t_now() const {
    if (entries_.empty()) throw InvalidState("empty history segment");
    return entries_.back().t;
}

bool HistorySegment::covers_window() const {
    if (entries_.empty()) return false;
    return entries_.back().t - entries_.front().t >= r_ - 1e-12 * (1.0 + r_);
}

void HistorySegment::push(double t, SpectralField u) {
    if (u.modes() != modes_)
        throw InvalidInput("history push: wrong mode count");
    if (!entries_.empty() && t <= entries_.back().t)
        throw InvalidInput("history push: times must be strictly increasing");
    entries_.push_back({t, std::move(u)});
    // Keep one entry before the window start so interpolation at theta = -r
    // stays defined.
    const double cutoff = entries_.back().t - r_;
    while (entries_.size() > 2 && entries_[1].t <= cutoff)
        entries_.pop_front();
}

SpectralField HistorySegment::at_time(double t) const {
    if (entries_.empty()) throw InvalidState("empty history segment");
    const double tol = 1e-12 * (1.0 + std::abs(t));
    if (t <= entries_.front().t + tol) {
        if (t < entries_.front().t - tol)
            throw InvalidState("history does not cover requested time");
        return entries_.front().u;
    }
    if (t >= entries_.back().t - tol) {
        if (t > entries_.back().t + tol)
            throw InvalidState("history does not cover requested time");
        return entries_.back().u;
    }
    // First entry with time >= t.
    size_t lo = 0, hi = entries_.size() - 1;
    while (hi - lo > 1) {
        size_t mid = (lo + hi) / 2;
        if (entries_[mid].t < t) lo = mid;
        else hi = mid;
    }
    const Entry& a = entries_[lo];
    const Entry& b = entries_[hi];
    const double w = (t - a.t) / (b.t - a.t);
    SpectralField out = a.u;
    for (int k = 0; k < out.modes(); ++k)
        out.coeffs[k] = (1.0 - w) * a.u.coeffs[k] + w * b.u.coeffs[k];
    return out;
}

SpectralField HistorySegment::sample(double theta) const {
    const double tol = 1e-12 * (1.0 + r_);
    if (theta < -r_ - tol || theta > tol)
        throw InvalidInput("history sample: theta outside [-r, 0]");
    theta = std::clamp(theta, -r_, 0.0);
    return at_time(t_now() + theta);
}

HistorySegment constant_history(double r, const SpectralField& u, double t0) {
    HistorySegment h(r, u.modes());
    h.push(t0 - r, u);
    h.push(t0, u);
    return h;
}

double h_norm(const PhaseState& s, const ThetaQuad& tq) {
    double acc = 0.0;
    for (double c : s.v.coeffs) acc += c * c;
    for (size_t j = 0; j < tq.nodes.size(); ++j) {
        SpectralField psi = s.history.sample(tq.nodes[j]);
        double n2 = 0.0;
        for (double c : psi.coeffs) n2 += c * c;
        acc += tq.weights[j] * n2;
    }
    return std::sqrt(acc);
}

double h_distance(const PhaseState& a, const PhaseState& b, const ThetaQuad& tq) {
    double acc = 0.0;
    for (int k = 0; k < a.v.modes(); ++k) {
        double d = a.v.coeffs[k] - b.v.coeffs[k];
        acc += d * d;
    }
    for (size_t j = 0; j < tq.nodes.size(); ++j) {
        SpectralField pa = a.history.sample(tq.nodes[j]);
        SpectralField pb = b.history.sample(tq.nodes[j]);
        double n2 = 0.0;
        for (int k = 0; k < pa.modes(); ++k) {
            double d = pa.coeffs[k] - pb.coeffs[k];
            n2 += d * d;
        }
        acc += tq.weights[j] * n2;
    }
    return std::sqrt(acc);
}

double h_distance_to_constant(const PhaseState& s, const SpectralField& target,
                              const ThetaQuad& tq) {
    double acc = 0.0;
    for (int k = 0; k < s.v.modes(); ++k) {
        double d = s.v.coeffs[k] - target.coeffs[k];
        acc += d * d;
    }
    for (size_t j = 0; j < tq.nodes.size(); ++j) {
        SpectralField psi = s.history.sample(tq.nodes[j]);
        double n2 = 0.0;
        for (int k = 0; k < psi.modes(); ++k) {
            double d = psi.coeffs[k] - target.coeffs[k];
            n2 += d * d;
        }
        acc += tq.weights[j] * n2;
    }
    return std::sqrt(acc);
}

} // namespace dpde
