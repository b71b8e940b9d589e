#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ryd/basis.hpp"
#include "ryd/hamiltonian.hpp"
#include "ryd/schedule.hpp"
#include "ryd/spectrum.hpp"
#include "ryd/trajectory.hpp"

namespace ryd {

// Unit conventions of the config file: lengths in nm, C6 in 2pi GHz um^6,
// Omega/delta in 2pi MHz, relaxation rates in 2pi kHz, times in us.
// Everything is converted to rad/s, um, s on load.
constexpr double kTwoPi = 6.283185307179586476925286766559;

struct DampingPoint {
    double gamma_r_2pi_khz = 0.0;
    double gamma_z_2pi_khz = 0.0;
};

struct ProfileConfig {
    std::vector<double> s;
    std::vector<double> value_2pi_mhz;
    std::vector<std::string> shape;
};

struct RunConfig {
    std::string name = "run";

    // system
    int n_sites = 19;
    double a_nm = 532.0;
    double c6_2pi_ghz_um6 = 2.45;
    double gamma_r_2pi_khz = 0.0;
    double gamma_z_2pi_khz = 0.0;
    int n_target = 3;

    // truncation
    int n_max = 5;
    int d = 3;

    // schedule (parameterized family unless explicit profiles are given)
    double tau_us = 12.0;
    double omega_max_2pi_mhz = 1.0;
    double delta_start_2pi_mhz = -1.0;
    double delta_end_2pi_mhz = 4.0;
    double ramp_fraction = 0.15;      // Omega ramp-up end, normalized time
    double ramp_down_start = 0.85;    // Omega ramp-down start, normalized time
    bool pulsed = true;
    std::optional<ProfileConfig> omega_profile;
    std::optional<ProfileConfig> delta_profile;

    // ensemble
    int trajectories = 1;
    std::uint64_t base_seed = 20160903;

    // integrator
    double dt_safety = 0.35;
    double p_step_max = 0.05;
    int output_points = 200;
    double dt_max_us = 0.0;

    // scans
    std::vector<double> tau_scan_us;
    std::vector<DampingPoint> damping_scan;
    std::vector<std::pair<int, int>> truncation_scan;  // (n_max, d) pairs

    // initial state: 1-based occupied sites (empty = all ground)
    std::vector<int> initial_sites;

    // derived physical objects
    SystemGeometry geometry() const;
    RelaxationParams relaxation() const;
    Schedule schedule() const;
    Basis make_basis() const;
    IntegratorOptions integrator() const;
    std::uint64_t initial_mask() const;

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
    // throws std::runtime_error with file:line on parse errors
    static RunConfig load(const std::string& path);
    void validate() const;
};

std::vector<std::string> preset_names();
RunConfig preset_config(const std::string& name);

}  // namespace ryd
