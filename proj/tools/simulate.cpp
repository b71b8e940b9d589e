#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "ryd/master.hpp"
#include "ryd/report.hpp"
#include "ryd/run_config.hpp"
#include "ryd/spectrum.hpp"
#include "ryd/trajectory.hpp"

using namespace ryd;
namespace fs = std::filesystem;

namespace {

struct Cli {
    std::string config_path;
    std::string preset;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 1;
};

RunConfig resolve(const Cli& cli) {
    RunConfig cfg;
    if (!cli.config_path.empty())
        cfg = RunConfig::load(cli.config_path);
    else if (!cli.preset.empty())
        cfg = preset_config(cli.preset);
    else
        throw std::runtime_error("either --config or --preset is required");
    if (cli.seed_set) cfg.base_seed = cli.seed;
    cfg.validate();
    fs::create_directories(cli.out_dir);
    return cfg;
}

nlohmann::json meta_for(const RunConfig& cfg, const Cli& cli) {
    nlohmann::json m;
    m["config"] = cfg.to_json();
    m["base_seed"] = cfg.base_seed;
    m["workers"] = cli.workers;
    return m;
}

// unitary ensembles are all identical; one trajectory carries the exact mean
int effective_trajectories(const RunConfig& cfg, const RelaxationParams& relax) {
    return relax.dissipative() ? cfg.trajectories : 1;
}

EnsembleResult run_point(const RunConfig& cfg, const Basis& basis, const HamiltonianParts& parts,
                         const RelaxationParams& relax, const Schedule& schedule, int workers) {
    const TrajectoryRunner runner(basis, parts, relax, schedule, cfg.integrator());
    return run_ensemble(runner, effective_trajectories(cfg, relax), cfg.base_seed, workers,
                        cfg.initial_mask());
}

nlohmann::json final_summary(const EnsembleResult& res, int n_target) {
    const std::size_t ti = res.times.size() - 1;
    const auto& lay = res.layout;
    nlohmann::json out;
    for (int n = 0; n <= lay.n_max; ++n) out["p_" + std::to_string(n)] = res.mean_at(ti, lay.p(n));
    for (int n = 0; n <= lay.n_top; ++n) {
        const double v = res.mean_at(ti, lay.p_min(n));
        if (!std::isnan(v)) out["P" + std::to_string(n) + "min"] = v;
    }
    out["mean_n"] = res.mean_at(ti, lay.mean_n());
    out["Q"] = res.q[ti];
    out["Q_se"] = res.q_stderr[ti];
    if (n_target <= lay.n_top) {
        out["fidelity"] = res.mean_at(ti, lay.p_min(n_target));
        out["fidelity_se"] = res.stderr_at(ti, lay.p_min(n_target));
    }
    const GaussianFit fit = fit_profile_row(lay, &res.mean[ti * lay.count()]);
    out["w"] = fit.width;
    out["A"] = fit.amplitude;
    out["fit_status"] = fit_status_name(fit.status);
    out["max_top_shell"] = res.max_top_shell;
    out["decay_jumps"] = res.decay_jumps;
    out["dephase_jumps"] = res.dephase_jumps;
    out["trajectories"] = res.trajectories;
    return out;
}

// leave-one-out error of the fitted width (the fit is nonlinear in the mean)
double jackknife_width_se(const EnsembleResult& res) {
    const int m = res.trajectories;
    if (m < 2 || res.final_rows.empty()) return 0.0;
    const auto& lay = res.layout;
    const std::size_t ti = res.times.size() - 1;
    std::vector<double> widths;
    for (int leave = 0; leave < m; ++leave) {
        std::vector<double> row(lay.count(), 0.0);
        for (std::size_t c = 0; c < lay.count(); ++c) {
            const double total = res.mean_at(ti, c) * m;
            row[c] = (total - res.final_rows[leave * lay.count() + c]) / (m - 1);
        }
        const GaussianFit fit = fit_profile_row(lay, row.data());
        if (fit.status == FitStatus::Degenerate) return 0.0;
        widths.push_back(fit.width);
    }
    double mean = 0.0;
    for (double w : widths) mean += w;
    mean /= m;
    double ss = 0.0;
    for (double w : widths) ss += (w - mean) * (w - mean);
    return std::sqrt(ss * (m - 1) / m);
}

int cmd_dynamics(const Cli& cli) {
    const RunConfig cfg = resolve(cli);
    const Basis basis = cfg.make_basis();
    const auto parts = build_hamiltonian(basis, cfg.geometry());
    const EnsembleResult res =
        run_point(cfg, basis, parts, cfg.relaxation(), cfg.schedule(), cli.workers);

    const auto meta = meta_for(cfg, cli);
    write_series_csv(cli.out_dir + "/" + cfg.name + "_series.csv", res, meta);
    nlohmann::json summary;
    summary["meta"] = meta;
    summary["dim"] = basis.size();
    summary["final"] = final_summary(res, cfg.n_target);
    write_json(cli.out_dir + "/" + cfg.name + "_summary.json", summary);
    std::printf("dynamics: dim=%zu final p_%d=%.4f F=%.4f\n", basis.size(), cfg.n_target,
                summary["final"].value("p_" + std::to_string(cfg.n_target), 0.0),
                summary["final"].value("fidelity", 0.0));
    return 0;
}

int cmd_tau_scan(const Cli& cli) {
    RunConfig cfg = resolve(cli);
    if (cfg.tau_scan_us.empty()) throw std::runtime_error("tau-scan requires scan.tau_list_us");
    std::vector<DampingPoint> damping = cfg.damping_scan;
    if (damping.empty()) damping.push_back({cfg.gamma_r_2pi_khz, cfg.gamma_z_2pi_khz});

    const Basis basis = cfg.make_basis();
    const auto parts = build_hamiltonian(basis, cfg.geometry());
    const Schedule base = cfg.schedule();

    const auto meta = meta_for(cfg, cli);
    CsvWriter csv(cli.out_dir + "/" + cfg.name + "_tau_scan.csv");
    csv.comment(meta.dump());
    csv.header({"tau_us", "gamma_r_2pi_khz", "gamma_z_2pi_khz", "M", "F", "F_se", "w", "w_se",
                "mean_n", "mean_n_se", "Q", "Q_se", "p_target", "max_top_shell"});
    nlohmann::json rows = nlohmann::json::array();

    for (const auto& dpt : damping) {
        RunConfig point = cfg;
        point.gamma_r_2pi_khz = dpt.gamma_r_2pi_khz;
        point.gamma_z_2pi_khz = dpt.gamma_z_2pi_khz;
        const RelaxationParams relax = point.relaxation();
        for (double tau_us : cfg.tau_scan_us) {
            const Schedule sched = base.rescaled(tau_us * 1e-6);
            const EnsembleResult res = run_point(point, basis, parts, relax, sched, cli.workers);
            const std::size_t ti = res.times.size() - 1;
            const auto& lay = res.layout;
            const GaussianFit fit = fit_profile_row(lay, &res.mean[ti * lay.count()]);
            const double f = res.mean_at(ti, lay.p_min(cfg.n_target));
            const double f_se = res.stderr_at(ti, lay.p_min(cfg.n_target));
            const double w_se = jackknife_width_se(res);
            csv.row({tau_us, dpt.gamma_r_2pi_khz, dpt.gamma_z_2pi_khz,
                     static_cast<double>(res.trajectories), f, f_se, fit.width, w_se,
                     res.mean_at(ti, lay.mean_n()), res.stderr_at(ti, lay.mean_n()), res.q[ti],
                     res.q_stderr[ti], res.mean_at(ti, lay.p(cfg.n_target)), res.max_top_shell});
            rows.push_back({{"tau_us", tau_us},
                            {"gamma_r_2pi_khz", dpt.gamma_r_2pi_khz},
                            {"gamma_z_2pi_khz", dpt.gamma_z_2pi_khz},
                            {"final", final_summary(res, cfg.n_target)}});
            std::printf("tau=%.2fus gr=%.1f gz=%.1f  F=%.4f w=%.3f\n", tau_us,
                        dpt.gamma_r_2pi_khz, dpt.gamma_z_2pi_khz, f, fit.width);
        }
    }
    nlohmann::json summary{{"meta", meta}, {"rows", rows}};
    write_json(cli.out_dir + "/" + cfg.name + "_tau_scan.json", summary);
    return 0;
}

int cmd_spectrum(const Cli& cli) {
    const RunConfig cfg = resolve(cli);
    const Basis basis = cfg.make_basis();
    const SystemGeometry geom = cfg.geometry();
    const Schedule sched = cfg.schedule();

    const int points = std::min(cfg.output_points, 81);
    std::vector<double> grid(points);
    const double lo = sched.delta_start(), hi = sched.delta_end();
    for (int i = 0; i < points; ++i) grid[i] = lo + (hi - lo) * i / (points - 1);

    const auto rows = level_diagram(basis, geom, grid);
    const auto meta = meta_for(cfg, cli);
    CsvWriter csv(cli.out_dir + "/" + cfg.name + "_levels.csv");
    csv.comment(meta.dump());
    csv.header({"delta_2pi_mhz", "n", "energy_2pi_mhz", "is_shell_min", "config_bitmask"});
    for (const auto& r : rows)
        csv.row({r.delta / (kTwoPi * 1e6), static_cast<double>(r.n), r.energy / (kTwoPi * 1e6),
                 r.is_shell_min ? 1.0 : 0.0, static_cast<double>(r.mask)});

    nlohmann::json summary{{"meta", meta}};
    auto& crossings = summary["crossings"];
    const int n_upto = std::min(cfg.n_target + 1, 4);
    for (const auto& row : crossing_table(n_upto, geom)) {
        nlohmann::json c{{"n_from", row.n_from},
                         {"n_to", row.n_to},
                         {"delta_cross_2pi_mhz", row.delta_cross / (kTwoPi * 1e6)},
                         {"exact", row.exact},
                         {"omega_rule", row.omega_rule}};
        if (row.n_to <= 4) {
            const auto eff = effective_rabi(row.n_to, sched.omega_max(), geom);
            c["omega_eff_2pi_mhz"] = eff.value / (kTwoPi * 1e6);
            c["omega_eff_estimate_only"] = eff.order_of_magnitude_only;
            const double t_cross = sched.time_at_detuning(row.delta_cross);
            if (t_cross >= 0.0) {
                const double alpha = sched.delta_slope(t_cross);
                c["sweep_rate_at_crossing"] = alpha;
                c["lz_nonadiabatic_prob"] =
                    landau_zener_nonadiabatic_prob(eff.value, alpha);
            }
        }
        crossings.push_back(c);
    }
    auto& gs = summary["ground_state_detunings_2pi_mhz"];
    for (int n = 0; n <= n_upto; ++n)
        gs.push_back(ground_state_detuning(n, geom) / (kTwoPi * 1e6));
    write_json(cli.out_dir + "/" + cfg.name + "_spectrum.json", summary);
    std::printf("spectrum: %zu rows over %d detunings, dim=%zu\n", rows.size(), points,
                basis.size());
    return 0;
}

int cmd_oracle_check(const Cli& cli) {
    const RunConfig cfg = resolve(cli);
    const Basis basis = cfg.make_basis();
    const auto parts = build_hamiltonian(basis, cfg.geometry());
    const RelaxationParams relax = cfg.relaxation();
    const Schedule sched = cfg.schedule();

    const TrajectoryRunner runner(basis, parts, relax, sched, cfg.integrator());
    const EnsembleResult ens = run_ensemble(runner, cfg.trajectories, cfg.base_seed, cli.workers,
                                            cfg.initial_mask());
    MasterOptions mopts;
    mopts.dt_safety = cfg.dt_safety;
    mopts.dt_max = cfg.dt_max_us * 1e-6;
    mopts.output_points = cfg.output_points;
    const MasterResult mast = evolve_master(basis, parts, relax, sched,
                                            pure_density(basis, cfg.initial_mask()), mopts);

    const auto meta = meta_for(cfg, cli);
    CsvWriter csv(cli.out_dir + "/" + cfg.name + "_oracle_check.csv");
    csv.comment(meta.dump());
    csv.header({"t_us", "observable", "trajectory", "stderr", "master", "z"});
    const auto names = ens.layout.names();
    const double atol = 1e-6;
    double worst_z = 0.0;
    std::string worst_name;
    bool pass = true;
    nlohmann::json per_col = nlohmann::json::object();
    for (std::size_t c = 0; c < ens.layout.count(); ++c) {
        if (c == ens.layout.norm()) continue;
        double col_max = 0.0;
        for (std::size_t ti = 0; ti < ens.times.size(); ++ti) {
            const double m = ens.mean_at(ti, c), ref = mast.at(ti, c);
            if (std::isnan(m) || std::isnan(ref)) continue;
            const double se = ens.stderr_at(ti, c);
            const double z = std::abs(m - ref) / (se + atol / 3.0);
            col_max = std::max(col_max, z);
            csv.row_mixed({CsvWriter::format(ens.times[ti] * 1e6), names[c],
                           CsvWriter::format(m), CsvWriter::format(se), CsvWriter::format(ref),
                           CsvWriter::format(z)});
            if (std::abs(m - ref) > 3.0 * se + atol) pass = false;
        }
        per_col[names[c]] = col_max;
        if (col_max > worst_z) {
            worst_z = col_max;
            worst_name = names[c];
        }
    }
    nlohmann::json summary{{"meta", meta},
                           {"max_z", worst_z},
                           {"worst_observable", worst_name},
                           {"per_observable_max_z", per_col},
                           {"pass_3_sigma", pass}};
    write_json(cli.out_dir + "/" + cfg.name + "_oracle_check.json", summary);
    std::printf("oracle-check: max z=%.3f (%s) -> %s\n", worst_z, worst_name.c_str(),
                pass ? "PASS" : "FAIL");
    return pass ? 0 : 3;
}

int cmd_convergence(const Cli& cli) {
    RunConfig cfg = resolve(cli);
    auto settings = cfg.truncation_scan;
    if (settings.empty())
        settings = {{cfg.n_max, cfg.d}, {cfg.n_max, cfg.d + 1}, {cfg.n_max + 1, cfg.d},
                    {cfg.n_max - 1, cfg.d}};
    // reference = most permissive retained space: largest n_max, then smallest d
    std::size_t ref_idx = 0;
    for (std::size_t i = 1; i < settings.size(); ++i) {
        if (settings[i].first > settings[ref_idx].first ||
            (settings[i].first == settings[ref_idx].first &&
             settings[i].second < settings[ref_idx].second))
            ref_idx = i;
    }

    struct Point {
        int n_max, d;
        std::size_t dim;
        EnsembleResult res;
    };
    std::vector<Point> points;
    for (const auto& [n_max, d] : settings) {
        RunConfig pc = cfg;
        pc.n_max = n_max;
        pc.d = d;
        pc.validate();
        const Basis basis = pc.make_basis();
        const auto parts = build_hamiltonian(basis, pc.geometry());
        EnsembleResult res =
            run_point(pc, basis, parts, pc.relaxation(), pc.schedule(), cli.workers);
        points.push_back({n_max, d, basis.size(), std::move(res)});
        std::printf("convergence: n_max=%d d=%d dim=%zu leak=%.2e\n", n_max, d, basis.size(),
                    points.back().res.max_top_shell);
    }

    const Point& ref = points[ref_idx];
    const double tol = 1e-3;
    nlohmann::json report{{"meta", meta_for(cfg, cli)}};
    report["reference"] = {{"n_max", ref.n_max}, {"d", ref.d}, {"dim", ref.dim}};
    auto& arr = report["settings"];
    for (const auto& pt : points) {
        const auto& lay = pt.res.layout;
        const auto& rlay = ref.res.layout;
        const std::size_t ti = pt.res.times.size() - 1;
        double max_diff = 0.0;
        const int shared_nmax = std::min(lay.n_max, rlay.n_max);
        for (int n = 0; n <= shared_nmax; ++n)
            max_diff = std::max(max_diff, std::abs(pt.res.mean_at(ti, lay.p(n)) -
                                                   ref.res.mean_at(ti, rlay.p(n))));
        max_diff = std::max(max_diff, std::abs(pt.res.mean_at(ti, lay.mean_n()) -
                                               ref.res.mean_at(ti, rlay.mean_n())));
        max_diff = std::max(max_diff, std::abs(pt.res.q[ti] - ref.res.q[ti]));
        if (cfg.n_target <= lay.n_top && cfg.n_target <= rlay.n_top)
            max_diff = std::max(max_diff, std::abs(pt.res.mean_at(ti, lay.p_min(cfg.n_target)) -
                                                   ref.res.mean_at(ti, rlay.p_min(cfg.n_target))));
        for (int j = 1; j <= lay.n_sites; ++j)
            max_diff = std::max(max_diff, std::abs(pt.res.mean_at(ti, lay.profile(j)) -
                                                   ref.res.mean_at(ti, rlay.profile(j))));
        arr.push_back({{"n_max", pt.n_max},
                       {"d", pt.d},
                       {"dim", pt.dim},
                       {"max_final_diff_vs_reference", max_diff},
                       {"max_top_shell", pt.res.max_top_shell},
                       {"flagged", max_diff > tol},
                       {"final", final_summary(pt.res, cfg.n_target)}});
        std::printf("  n_max=%d d=%d: max diff vs ref %.3e%s\n", pt.n_max, pt.d, max_diff,
                    max_diff > tol ? "  [FLAGGED]" : "");
    }
    write_json(cli.out_dir + "/" + cfg.name + "_convergence.json", report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rydberg-lattice adiabatic sweep simulator"};
    app.require_subcommand(1);

    Cli cli;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", cli.config_path, "JSON config file");
        sub->add_option("--preset", cli.preset, "built-in preset name");
        sub->add_option("--out", cli.out_dir, "output directory");
        sub->add_option("--seed", cli.seed, "override ensemble.base_seed")
            ->each([&](const std::string&) { cli.seed_set = true; });
        sub->add_option("--workers", cli.workers, "trajectory worker threads");
    };

    auto* dyn = app.add_subcommand("dynamics", "time series for one (tau, damping) point");
    auto* tau = app.add_subcommand("tau-scan", "final observables versus preparation time");
    auto* spec = app.add_subcommand("spectrum", "classical level diagram and crossings");
    auto* orac = app.add_subcommand("oracle-check", "trajectory ensemble vs master equation");
    auto* conv = app.add_subcommand("convergence", "truncation (n_max, d) sweep");
    auto* pres = app.add_subcommand("presets", "list built-in presets");
    for (auto* s : {dyn, tau, spec, orac, conv}) add_common(s);

    CLI11_PARSE(app, argc, argv);

    try {
        if (pres->parsed()) {
            for (const auto& n : preset_names()) std::printf("%s\n", n.c_str());
            return 0;
        }
        if (dyn->parsed()) return cmd_dynamics(cli);
        if (tau->parsed()) return cmd_tau_scan(cli);
        if (spec->parsed()) return cmd_spectrum(cli);
        if (orac->parsed()) return cmd_oracle_check(cli);
        if (conv->parsed()) return cmd_convergence(cli);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
