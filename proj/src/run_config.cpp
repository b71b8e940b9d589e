#include "ryd/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ryd {

namespace {

double mhz(double v) { return kTwoPi * 1e6 * v; }
double khz(double v) { return kTwoPi * 1e3 * v; }

Profile profile_from_config(const ProfileConfig& pc) {
    Profile p;
    p.s = pc.s;
    for (double v : pc.value_2pi_mhz) p.value.push_back(mhz(v));
    for (const auto& s : pc.shape) p.shape.push_back(segment_shape_from_string(s));
    return p;
}

ProfileConfig profile_to_config(const Profile& p) {
    ProfileConfig pc;
    pc.s = p.s;
    for (double v : p.value) pc.value_2pi_mhz.push_back(v / (kTwoPi * 1e6));
    for (auto s : p.shape) pc.shape.push_back(to_string(s));
    return pc;
}

}  // namespace

SystemGeometry RunConfig::geometry() const {
    return {n_sites, a_nm * 1e-3, kTwoPi * 1e9 * c6_2pi_ghz_um6};
}

RelaxationParams RunConfig::relaxation() const {
    return {khz(gamma_r_2pi_khz), khz(gamma_z_2pi_khz)};
}

Schedule RunConfig::schedule() const {
    const double tau = tau_us * 1e-6;
    if (omega_profile || delta_profile) {
        Profile op = omega_profile ? profile_from_config(*omega_profile)
                                   : make_sweep_schedule(tau, mhz(omega_max_2pi_mhz),
                                                         mhz(delta_start_2pi_mhz),
                                                         mhz(delta_end_2pi_mhz), ramp_fraction,
                                                         ramp_down_start)
                                         .omega_profile();
        Profile dp;
        if (delta_profile) {
            dp = profile_from_config(*delta_profile);
        } else {
            dp.s = {0.0, 1.0};
            dp.value = {mhz(delta_start_2pi_mhz), mhz(delta_end_2pi_mhz)};
            dp.shape = {SegmentShape::Linear};
        }
        return Schedule(tau, op, dp, pulsed);
    }
    if (pulsed)
        return make_sweep_schedule(tau, mhz(omega_max_2pi_mhz), mhz(delta_start_2pi_mhz),
                                   mhz(delta_end_2pi_mhz), ramp_fraction, ramp_down_start);
    return make_flat_schedule(tau, mhz(omega_max_2pi_mhz), mhz(delta_start_2pi_mhz),
                              mhz(delta_end_2pi_mhz));
}

Basis RunConfig::make_basis() const { return Basis::enumerate(n_sites, n_max, d); }

IntegratorOptions RunConfig::integrator() const {
    return {dt_safety, p_step_max, dt_max_us * 1e-6, output_points};
}

std::uint64_t RunConfig::initial_mask() const {
    std::uint64_t m = 0;
    for (int s : initial_sites) {
        if (s < 1 || s > n_sites) throw std::invalid_argument("initial site out of range");
        m |= 1ULL << (s - 1);
    }
    return m;
}

void RunConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
    if (n_sites < 1 || n_sites > 63) fail("system.n_sites must be in [1, 63]");
    if (a_nm <= 0) fail("system.a_nm must be positive");
    if (c6_2pi_ghz_um6 <= 0) fail("system.c6_2pi_ghz_um6 must be positive");
    if (gamma_r_2pi_khz < 0 || gamma_z_2pi_khz < 0) fail("relaxation rates must be nonnegative");
    if (n_max < 0 || n_max > n_sites) fail("truncation.n_max must be in [0, N]");
    if (d < 1) fail("truncation.d must be >= 1");
    if (tau_us <= 0) fail("schedule.tau_us must be positive");
    if (trajectories < 1) fail("ensemble.trajectories must be >= 1");
    if (dt_safety <= 0 || dt_safety > 2.0) fail("integrator.dt_safety must be in (0, 2]");
    if (p_step_max <= 0 || p_step_max >= 1) fail("integrator.p_step_max must be in (0, 1)");
    if (output_points < 2) fail("integrator.output_points must be >= 2");
    for (std::size_t i = 1; i < tau_scan_us.size(); ++i)
        if (tau_scan_us[i] <= tau_scan_us[i - 1]) fail("scan.tau_list_us must strictly increase");
    schedule();  // profile/monotonicity checks
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["system"] = {{"n_sites", n_sites},
                   {"a_nm", a_nm},
                   {"c6_2pi_ghz_um6", c6_2pi_ghz_um6},
                   {"gamma_r_2pi_khz", gamma_r_2pi_khz},
                   {"gamma_z_2pi_khz", gamma_z_2pi_khz},
                   {"n_target", n_target}};
    j["truncation"] = {{"n_max", n_max}, {"d", d}};
    j["schedule"] = {{"tau_us", tau_us},
                     {"omega_max_2pi_mhz", omega_max_2pi_mhz},
                     {"delta_start_2pi_mhz", delta_start_2pi_mhz},
                     {"delta_end_2pi_mhz", delta_end_2pi_mhz},
                     {"ramp_fraction", ramp_fraction},
                     {"ramp_down_start", ramp_down_start},
                     {"pulsed", pulsed}};
    auto dump_profile = [](const ProfileConfig& pc) {
        return nlohmann::json{
            {"s", pc.s}, {"value_2pi_mhz", pc.value_2pi_mhz}, {"shape", pc.shape}};
    };
    if (omega_profile) j["schedule"]["omega_profile"] = dump_profile(*omega_profile);
    if (delta_profile) j["schedule"]["delta_profile"] = dump_profile(*delta_profile);
    j["ensemble"] = {{"trajectories", trajectories}, {"base_seed", base_seed}};
    j["integrator"] = {{"dt_safety", dt_safety},
                       {"p_step_max", p_step_max},
                       {"output_points", output_points},
                       {"dt_max_us", dt_max_us}};
    if (!tau_scan_us.empty()) j["scan"]["tau_list_us"] = tau_scan_us;
    if (!damping_scan.empty()) {
        auto& arr = j["scan"]["damping"];
        for (const auto& dpt : damping_scan)
            arr.push_back({{"gamma_r_2pi_khz", dpt.gamma_r_2pi_khz},
                           {"gamma_z_2pi_khz", dpt.gamma_z_2pi_khz}});
    }
    if (!truncation_scan.empty()) {
        auto& arr = j["scan"]["truncation"];
        for (const auto& [nm, dd] : truncation_scan) arr.push_back({{"n_max", nm}, {"d", dd}});
    }
    if (!initial_sites.empty()) j["initial_sites"] = initial_sites;
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c;
    auto get = [](const nlohmann::json& obj, const char* key, auto& dst) {
        if (obj.contains(key)) obj.at(key).get_to(dst);
    };
    get(j, "name", c.name);
    if (j.contains("system")) {
        const auto& s = j["system"];
        get(s, "n_sites", c.n_sites);
        get(s, "a_nm", c.a_nm);
        get(s, "c6_2pi_ghz_um6", c.c6_2pi_ghz_um6);
        get(s, "gamma_r_2pi_khz", c.gamma_r_2pi_khz);
        get(s, "gamma_z_2pi_khz", c.gamma_z_2pi_khz);
        get(s, "n_target", c.n_target);
    }
    if (j.contains("truncation")) {
        get(j["truncation"], "n_max", c.n_max);
        get(j["truncation"], "d", c.d);
    }
    if (j.contains("schedule")) {
        const auto& s = j["schedule"];
        get(s, "tau_us", c.tau_us);
        get(s, "omega_max_2pi_mhz", c.omega_max_2pi_mhz);
        get(s, "delta_start_2pi_mhz", c.delta_start_2pi_mhz);
        get(s, "delta_end_2pi_mhz", c.delta_end_2pi_mhz);
        get(s, "ramp_fraction", c.ramp_fraction);
        get(s, "ramp_down_start", c.ramp_down_start);
        get(s, "pulsed", c.pulsed);
        auto load_profile = [](const nlohmann::json& p) {
            ProfileConfig pc;
            p.at("s").get_to(pc.s);
            p.at("value_2pi_mhz").get_to(pc.value_2pi_mhz);
            p.at("shape").get_to(pc.shape);
            return pc;
        };
        if (s.contains("omega_profile")) c.omega_profile = load_profile(s["omega_profile"]);
        if (s.contains("delta_profile")) c.delta_profile = load_profile(s["delta_profile"]);
    }
    if (j.contains("ensemble")) {
        get(j["ensemble"], "trajectories", c.trajectories);
        get(j["ensemble"], "base_seed", c.base_seed);
    }
    if (j.contains("integrator")) {
        const auto& s = j["integrator"];
        get(s, "dt_safety", c.dt_safety);
        get(s, "p_step_max", c.p_step_max);
        get(s, "output_points", c.output_points);
        get(s, "dt_max_us", c.dt_max_us);
    }
    if (j.contains("scan")) {
        const auto& s = j["scan"];
        get(s, "tau_list_us", c.tau_scan_us);
        if (s.contains("damping"))
            for (const auto& dpt : s["damping"])
                c.damping_scan.push_back({dpt.value("gamma_r_2pi_khz", 0.0),
                                          dpt.value("gamma_z_2pi_khz", 0.0)});
        if (s.contains("truncation"))
            for (const auto& ts : s["truncation"])
                c.truncation_scan.emplace_back(ts.at("n_max").get<int>(), ts.at("d").get<int>());
    }
    get(j, "initial_sites", c.initial_sites);
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i)
            if (text[i] == '\n') ++line;
        throw std::runtime_error(path + ":" + std::to_string(line) + ": " + e.what());
    }
    RunConfig c = from_json(j);
    try {
        c.validate();
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return c;
}

std::vector<std::string> preset_names() {
    return {"n19-fig2", "n13-fig5-left", "n31-fig5-right", "n1-rabi", "n2-blockade",
            "lz-benchmark", "n4-oracle"};
}

RunConfig preset_config(const std::string& name) {
    RunConfig c;
    c.name = name;
    if (name == "n19-fig2") {
        // calibrated once against the paper's N=19, tau=12us end point
        c.n_sites = 19;
        c.n_target = 3;
        c.n_max = 5;
        c.d = 3;
        c.tau_us = 12.0;
        c.omega_max_2pi_mhz = 1.0;
        c.delta_start_2pi_mhz = -1.0;
        c.delta_end_2pi_mhz = 3.8;
        c.damping_scan = {{0.0, 0.0}, {4.0, 0.0}, {0.0, 8.0}, {4.0, 8.0}};
        c.tau_scan_us = {4.0, 8.0, 12.0, 16.0, 20.0};
        c.trajectories = 200;
    } else if (name == "n13-fig5-left") {
        c = preset_config("n19-fig2");
        c.name = name;
        c.n_sites = 13;
        c.n_target = 2;
    } else if (name == "n31-fig5-right") {
        c = preset_config("n19-fig2");
        c.name = name;
        c.n_sites = 31;
        c.n_target = 4;
    } else if (name == "n1-rabi") {
        c.n_sites = 1;
        c.n_target = 1;
        c.n_max = 1;
        c.d = 1;
        c.tau_us = 3.0;
        c.omega_max_2pi_mhz = 0.5;
        c.delta_start_2pi_mhz = 0.0;
        c.delta_end_2pi_mhz = 0.0;
        c.pulsed = false;
        c.dt_safety = 0.02;
    } else if (name == "n2-blockade") {
        c.n_sites = 2;
        c.n_target = 1;
        c.n_max = 2;
        c.d = 1;
        c.a_nm = 2500.0;
        c.tau_us = 5.0;
        c.omega_max_2pi_mhz = 0.1;
        c.delta_start_2pi_mhz = 0.0;
        c.delta_end_2pi_mhz = 0.0;
        c.pulsed = false;
        c.dt_safety = 0.05;
    } else if (name == "lz-benchmark") {
        c.n_sites = 5;
        c.n_target = 1;
        c.n_max = 1;
        c.d = 1;
        c.omega_max_2pi_mhz = 0.05;
        // +-40 * sqrt(N) Omega window around the crossing; the coupling ramps
        // on/off near the window edges where the gap is large
        const double window = 40.0 * std::sqrt(5.0) * 0.05;
        c.delta_start_2pi_mhz = -window;
        c.delta_end_2pi_mhz = window;
        c.tau_us = 30.0;
        c.ramp_fraction = 0.1;
        c.ramp_down_start = 0.9;
        c.dt_safety = 0.02;
    } else if (name == "n4-oracle") {
        c.n_sites = 4;
        c.n_target = 2;
        c.n_max = 4;
        c.d = 1;
        c.a_nm = 2080.0;
        c.tau_us = 3.0;
        c.omega_max_2pi_mhz = 1.0;
        c.delta_start_2pi_mhz = -0.8;
        c.delta_end_2pi_mhz = 2.7;
        c.gamma_r_2pi_khz = 8.0;
        c.gamma_z_2pi_khz = 8.0;
        c.trajectories = 2000;
        c.dt_safety = 0.1;
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    return c;
}

}  // namespace ryd
