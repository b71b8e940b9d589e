#include "ryd/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ryd {

SegmentShape segment_shape_from_string(const std::string& s) {
    if (s == "constant") return SegmentShape::Constant;
    if (s == "linear") return SegmentShape::Linear;
    if (s == "sin2") return SegmentShape::SinSquared;
    throw std::invalid_argument("unknown segment shape: " + s);
}

std::string to_string(SegmentShape s) {
    switch (s) {
        case SegmentShape::Constant: return "constant";
        case SegmentShape::Linear: return "linear";
        case SegmentShape::SinSquared: return "sin2";
    }
    return "?";
}

void Profile::validate(const char* name) const {
    if (s.size() < 2 || s.size() != value.size() || shape.size() != s.size() - 1)
        throw std::invalid_argument(std::string(name) + ": malformed profile");
    if (std::abs(s.front()) > 1e-12 || std::abs(s.back() - 1.0) > 1e-12)
        throw std::invalid_argument(std::string(name) + ": profile must span s in [0, 1]");
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] <= s[i - 1])
            throw std::invalid_argument(std::string(name) + ": breakpoints must increase");
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (shape[i] == SegmentShape::Constant && std::abs(value[i + 1] - value[i]) > 0.0)
            throw std::invalid_argument(std::string(name) +
                                        ": constant segment with unequal endpoint values");
}

namespace {

std::size_t segment_index(const std::vector<double>& s, double sn) {
    // rightmost segment whose start is <= sn
    auto it = std::upper_bound(s.begin(), s.end(), sn);
    std::size_t i = static_cast<std::size_t>(it - s.begin());
    if (i == 0) return 0;
    if (i >= s.size()) return s.size() - 2;
    return i - 1;
}

}  // namespace

double Profile::eval(double sn) const {
    const std::size_t i = segment_index(s, sn);
    const double u = (sn - s[i]) / (s[i + 1] - s[i]);
    switch (shape[i]) {
        case SegmentShape::Constant: return value[i];
        case SegmentShape::Linear: return value[i] + (value[i + 1] - value[i]) * u;
        case SegmentShape::SinSquared: {
            const double w = std::sin(0.5 * M_PI * u);
            return value[i] + (value[i + 1] - value[i]) * w * w;
        }
    }
    return value[i];
}

double Profile::slope(double sn) const {
    const std::size_t i = segment_index(s, sn);
    const double len = s[i + 1] - s[i];
    const double u = (sn - s[i]) / len;
    switch (shape[i]) {
        case SegmentShape::Constant: return 0.0;
        case SegmentShape::Linear: return (value[i + 1] - value[i]) / len;
        case SegmentShape::SinSquared:
            return (value[i + 1] - value[i]) * 0.5 * M_PI * std::sin(M_PI * u) / len;
    }
    return 0.0;
}

Schedule::Schedule(double tau, Profile omega, Profile delta, bool pulsed)
    : tau_(tau), omega_(std::move(omega)), delta_(std::move(delta)), pulsed_(pulsed) {
    if (tau_ <= 0.0) throw std::invalid_argument("Schedule: tau must be positive");
    omega_.validate("omega");
    delta_.validate("delta");
    for (double v : omega_.value)
        if (v < 0.0) throw std::invalid_argument("Schedule: Omega must be nonnegative");
    for (std::size_t i = 1; i < delta_.value.size(); ++i)
        if (delta_.value[i] < delta_.value[i - 1])
            throw std::invalid_argument("Schedule: delta must be monotone non-decreasing");
    if (pulsed_ && (omega_.value.front() != 0.0 || omega_.value.back() != 0.0))
        throw std::invalid_argument("Schedule: pulsed drive requires Omega(0) = Omega(tau) = 0");
}

double Schedule::normalize(double t) const {
    const double slack = 1e-9 * tau_;
    if (t < -slack || t > tau_ + slack)
        throw std::out_of_range("Schedule: t outside [0, tau]");
    return std::clamp(t / tau_, 0.0, 1.0);
}

double Schedule::omega_max() const {
    // profile extrema occur at breakpoints for all supported shapes
    double m = 0.0;
    for (double v : omega_.value) m = std::max(m, v);
    return m;
}

double Schedule::delta_abs_max() const {
    double m = 0.0;
    for (double v : delta_.value) m = std::max(m, std::abs(v));
    return m;
}

Schedule Schedule::rescaled(double new_tau) const {
    if (new_tau <= 0.0) throw std::invalid_argument("rescaled: tau must be positive");
    Schedule s(*this);
    s.tau_ = new_tau;
    return s;
}

double Schedule::time_at_detuning(double target) const {
    if (target < delta_start() || target > delta_end()) return -1.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (delta_.eval(mid) < target) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi) * tau_;
}

Schedule make_sweep_schedule(double tau, double omega_max, double delta_start, double delta_end,
                             double ramp_up, double down_start) {
    if (ramp_up <= 0.0 || down_start <= ramp_up || down_start >= 1.0)
        throw std::invalid_argument("make_sweep_schedule: need 0 < ramp_up < down_start < 1");
    Profile omega;
    omega.s = {0.0, ramp_up, down_start, 1.0};
    omega.value = {0.0, omega_max, omega_max, 0.0};
    omega.shape = {SegmentShape::SinSquared, SegmentShape::Constant, SegmentShape::SinSquared};
    Profile delta;
    delta.s = {0.0, 1.0};
    delta.value = {delta_start, delta_end};
    delta.shape = {SegmentShape::Linear};
    return Schedule(tau, omega, delta, true);
}

Schedule make_flat_schedule(double tau, double omega, double delta_start, double delta_end) {
    Profile op;
    op.s = {0.0, 1.0};
    op.value = {omega, omega};
    op.shape = {SegmentShape::Constant};
    Profile dp;
    dp.s = {0.0, 1.0};
    dp.value = {delta_start, delta_end};
    dp.shape = {SegmentShape::Linear};
    return Schedule(tau, op, dp, false);
}

}  // namespace ryd
