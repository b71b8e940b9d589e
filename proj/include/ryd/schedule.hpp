#pragma once

#include <string>
#include <vector>

namespace ryd {

enum class SegmentShape { Constant, Linear, SinSquared };

SegmentShape segment_shape_from_string(const std::string& s);
std::string to_string(SegmentShape s);

// Piecewise control curve over normalized time s = t/tau in [0, 1]:
// breakpoints (s_i, v_i) with a ramp shape per segment.  SinSquared ramps
// v_i -> v_{i+1} with zero slope at both ends; Constant holds v_i.
struct Profile {
    std::vector<double> s;
    std::vector<double> value;
    std::vector<SegmentShape> shape;  // size = breakpoints - 1

    double eval(double sn) const;
    double slope(double sn) const;  // d(value)/ds
    void validate(const char* name) const;
};

// Time-dependent drive: Rabi frequency Omega(t) >= 0 and detuning delta(t)
// over a duration tau.  Profiles are stored in normalized time, so changing
// tau rescales the whole time dependence ("same pulse, slower").
class Schedule {
  public:
    Schedule() = default;
    Schedule(double tau, Profile omega, Profile delta, bool pulsed = true);

    double tau() const { return tau_; }
    bool pulsed() const { return pulsed_; }

    double omega_at(double t) const { return omega_.eval(normalize(t)); }
    double delta_at(double t) const { return delta_.eval(normalize(t)); }
    // dDelta/dt, the local sweep rate used in Landau-Zener estimates
    double delta_slope(double t) const { return delta_.slope(normalize(t)) / tau_; }

    double delta_start() const { return delta_.value.front(); }
    double delta_end() const { return delta_.value.back(); }
    double omega_max() const;
    double delta_abs_max() const;

    Schedule rescaled(double new_tau) const;

    // First time at which delta(t) = target (delta is monotone); returns
    // negative if target is outside the swept range.
    double time_at_detuning(double target) const;

    const Profile& omega_profile() const { return omega_; }
    const Profile& delta_profile() const { return delta_; }

  private:
    double normalize(double t) const;

    double tau_ = 1.0;
    Profile omega_;
    Profile delta_;
    bool pulsed_ = true;
};

// Default preparation pulse: sin^2 ramp of Omega up over [0, ramp_up],
// plateau, sin^2 ramp down over [down_start, 1]; delta linear from
// delta_start to delta_end.  A long ramp-down (small down_start) keeps the
// late sweep adiabatic while the dressing is removed.
Schedule make_sweep_schedule(double tau, double omega_max, double delta_start, double delta_end,
                             double ramp_up = 0.15, double down_start = 0.85);

// Constant Omega with a linear detuning sweep (Landau-Zener style runs).
Schedule make_flat_schedule(double tau, double omega, double delta_start, double delta_end);

}  // namespace ryd
