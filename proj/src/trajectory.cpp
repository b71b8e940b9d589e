#include "ryd/trajectory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace ryd {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t trajectory_seed(std::uint64_t base_seed, std::uint64_t index) {
    return mix64(base_seed ^ mix64(index + 1));
}

std::vector<std::string> ObservableLayout::names() const {
    std::vector<std::string> out;
    for (int n = 0; n <= n_max; ++n) out.push_back("p_" + std::to_string(n));
    for (int n = 0; n <= n_top; ++n) out.push_back("P" + std::to_string(n) + "min");
    out.push_back("mean_n");
    out.push_back("mean_n2");
    out.push_back("norm");
    for (int j = 1; j <= n_sites; ++j) out.push_back("profile_" + std::to_string(j));
    return out;
}

void ObservableLayout::flatten(const ObservableSet& obs, double norm2, double* row) const {
    for (int n = 0; n <= n_max; ++n) row[p(n)] = obs.p[n];
    for (int n = 0; n <= n_top; ++n) row[p_min(n)] = obs.p_min[n];
    row[mean_n()] = obs.mean_n;
    row[mean_n2()] = obs.mean_n2;
    row[norm()] = norm2;
    for (int j = 1; j <= n_sites; ++j) row[profile(j)] = obs.profile[j - 1];
}

void apply_decay_jump(std::vector<cxd>& psi, int site, const HamiltonianParts& parts) {
    std::vector<cxd> out(psi.size(), cxd{0.0, 0.0});
    for (const auto& [from, to] : parts.decay_to[site - 1]) out[to] = psi[from];
    psi = std::move(out);
}

void apply_dephase_jump(std::vector<cxd>& psi, int site, const Basis& basis) {
    const std::uint64_t bit = 1ULL << (site - 1);
    for (std::size_t i = 0; i < psi.size(); ++i)
        if (!(basis.state(i) & bit)) psi[i] = -psi[i];
}

TrajectoryRunner::TrajectoryRunner(const Basis& basis, const HamiltonianParts& parts,
                                   const RelaxationParams& relax, const Schedule& schedule,
                                   IntegratorOptions opts)
    : basis_(basis), parts_(parts), relax_(relax), schedule_(schedule), opts_(opts),
      targets_(TargetProjectors::make(basis)) {
    layout_ = {basis.n_max(), targets_.n_top, basis.n_sites()};
    const double bound =
        spectral_bound(parts_, schedule_.omega_max(), schedule_.delta_abs_max(), relax_);
    dt_ = opts_.dt_safety / std::max(bound, 1e-30);
    if (relax_.dissipative()) {
        const double jump_rate = relax_.gamma_r * basis.n_max() + relax_.gamma_z * basis.n_sites();
        dt_ = std::min(dt_, opts_.p_step_max / jump_rate);
    }
    if (opts_.dt_max > 0.0) dt_ = std::min(dt_, opts_.dt_max);
    dt_ = std::min(dt_, schedule_.tau());
}

std::vector<double> TrajectoryRunner::output_times() const {
    const int np = std::max(2, opts_.output_points);
    std::vector<double> t(np);
    for (int i = 0; i < np; ++i) t[i] = schedule_.tau() * i / (np - 1);
    return t;
}

void TrajectoryRunner::rk4(std::vector<cxd>& psi, double t, double dt, std::vector<cxd>& k1,
                           std::vector<cxd>& k2, std::vector<cxd>& k3, std::vector<cxd>& k4,
                           std::vector<cxd>& tmp) const {
    const std::size_t dim = psi.size();
    auto rhs = [&](std::vector<cxd>& out, const std::vector<cxd>& in, double tt) {
        apply_effective_rhs(out, in, schedule_.omega_at(tt), schedule_.delta_at(tt), parts_,
                            relax_);
    };
    rhs(k1, psi, t);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = psi[i] + 0.5 * dt * k1[i];
    rhs(k2, tmp, t + 0.5 * dt);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = psi[i] + 0.5 * dt * k2[i];
    rhs(k3, tmp, t + 0.5 * dt);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = psi[i] + dt * k3[i];
    rhs(k4, tmp, t + dt);
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < dim; ++i)
        psi[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

bool TrajectoryRunner::attempt_step(TrajectoryState& state, double dt, int depth) const {
    thread_local std::vector<cxd> k1, k2, k3, k4, tmp, backup;
    const std::size_t dim = state.psi.size();
    k1.resize(dim); k2.resize(dim); k3.resize(dim); k4.resize(dim); tmp.resize(dim);

    const bool dissipative = relax_.dissipative();
    if (dissipative) backup = state.psi;

    rk4(state.psi, state.t, dt, k1, k2, k3, k4, tmp);

    if (!dissipative) {
        state.t += dt;
        return true;
    }

    double norm2 = 0.0, occupancy = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double w = std::norm(state.psi[i]);
        norm2 += w;
        occupancy += w * parts_.diag_number[i];
    }
    const double mean_n = occupancy / norm2;
    const double w_total = (relax_.gamma_r * mean_n + relax_.gamma_z * parts_.n_sites) * dt;

    if (w_total > opts_.p_step_max) {
        if (depth >= 24)
            throw std::runtime_error("trajectory step: jump probability cap unreachable");
        state.psi = backup;
        attempt_step(state, 0.5 * dt, depth + 1);
        attempt_step(state, 0.5 * dt, depth + 1);
        return true;
    }

    const double u = state.rng.uniform();
    if (u < w_total) {
        // locate the jump channel: decay on site 1..N, then dephasing on 1..N
        double cum = 0.0;
        int site = 0;
        JumpKind kind = JumpKind::Dephase;
        if (relax_.gamma_r > 0.0) {
            std::vector<double> site_occup(parts_.n_sites, 0.0);
            for (std::size_t i = 0; i < dim; ++i) {
                const double w = std::norm(state.psi[i]) / norm2;
                std::uint64_t m = basis_.state(i);
                while (m) {
                    site_occup[__builtin_ctzll(m)] += w;
                    m &= m - 1;
                }
            }
            for (int j = 0; j < parts_.n_sites && site == 0; ++j) {
                cum += relax_.gamma_r * site_occup[j] * dt;
                if (u < cum) {
                    site = j + 1;
                    kind = JumpKind::Decay;
                }
            }
        }
        if (site == 0) {
            const double rest = u - cum;  // inside the dephasing block
            int j = static_cast<int>(rest / (relax_.gamma_z * dt));
            site = std::clamp(j, 0, parts_.n_sites - 1) + 1;
            kind = JumpKind::Dephase;
        }
        if (kind == JumpKind::Decay)
            apply_decay_jump(state.psi, site, parts_);
        else
            apply_dephase_jump(state.psi, site, basis_);
        double n2 = 0.0;
        for (const auto& a : state.psi) n2 += std::norm(a);
        if (n2 <= 0.0) throw std::runtime_error("trajectory step: jump annihilated the state");
        const double inv = 1.0 / std::sqrt(n2);
        for (auto& a : state.psi) a *= inv;
        state.jump_log.push_back({state.t + dt, kind, site});
    }
    state.t += dt;
    return true;
}

void TrajectoryRunner::step(TrajectoryState& state, double dt) const { attempt_step(state, dt, 0); }

TrajectoryRecord TrajectoryRunner::run(std::uint64_t seed, std::uint64_t initial_mask) const {
    const std::int64_t start = basis_.index_of(initial_mask);
    if (start < 0) throw std::invalid_argument("run_trajectory: initial state not in basis");

    TrajectoryState state(basis_.size(), seed);
    state.psi[start] = cxd{1.0, 0.0};

    TrajectoryRecord rec;
    rec.times = output_times();
    rec.layout = layout_;
    rec.values.assign(rec.times.size() * layout_.count(), 0.0);

    std::vector<cxd> normalized(basis_.size());
    auto sample = [&](std::size_t ti) {
        double n2 = 0.0;
        for (const auto& a : state.psi) n2 += std::norm(a);
        const double inv = 1.0 / std::sqrt(n2);
        for (std::size_t i = 0; i < state.psi.size(); ++i) normalized[i] = inv * state.psi[i];
        const ObservableSet obs = measure_state(normalized, basis_, targets_);
        layout_.flatten(obs, n2, &rec.values[ti * layout_.count()]);
    };

    sample(0);
    for (std::size_t ti = 1; ti < rec.times.size(); ++ti) {
        const double t_next = rec.times[ti];
        const double span = t_next - state.t;
        const int n_sub = std::max(1, static_cast<int>(std::ceil(span / dt_ - 1e-12)));
        const double dt = span / n_sub;
        for (int k = 0; k < n_sub; ++k) step(state, dt);
        state.t = t_next;  // avoid accumulation drift
        sample(ti);
    }
    rec.jump_log = std::move(state.jump_log);
    return rec;
}

EnsembleResult run_ensemble(const TrajectoryRunner& runner, int trajectories,
                            std::uint64_t base_seed, int workers, std::uint64_t initial_mask) {
    if (trajectories < 1) throw std::invalid_argument("run_ensemble: need at least 1 trajectory");

    const std::vector<double> times = runner.output_times();
    const ObservableLayout layout = runner.layout();
    const std::size_t cols = layout.count();
    const std::size_t cells = times.size() * cols;

    std::vector<std::vector<double>> values(trajectories);
    std::vector<std::pair<std::size_t, std::size_t>> jumps(trajectories, {0, 0});

    auto work = [&](int m) {
        TrajectoryRecord rec = runner.run(trajectory_seed(base_seed, m), initial_mask);
        values[m] = std::move(rec.values);
        for (const auto& e : rec.jump_log)
            (e.kind == JumpKind::Decay ? jumps[m].first : jumps[m].second)++;
    };

    if (workers <= 1 || trajectories == 1) {
        for (int m = 0; m < trajectories; ++m) work(m);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        const int nw = std::min(workers, trajectories);
        pool.reserve(nw);
        for (int w = 0; w < nw; ++w)
            pool.emplace_back([&] {
                for (int m = next.fetch_add(1); m < trajectories; m = next.fetch_add(1)) work(m);
            });
        for (auto& th : pool) th.join();
    }

    EnsembleResult res;
    res.times = times;
    res.layout = layout;
    res.trajectories = trajectories;
    res.base_seed = base_seed;
    res.mean.assign(cells, 0.0);
    res.stderror.assign(cells, 0.0);
    res.q.assign(times.size(), 0.0);
    res.q_stderr.assign(times.size(), 0.0);

    // reduce in trajectory order (two passes): byte-identical for any worker
    // count, and exact zeros survive when all trajectories coincide
    res.final_rows.assign(static_cast<std::size_t>(trajectories) * cols, 0.0);
    std::vector<double> sum(cells, 0.0);
    for (int m = 0; m < trajectories; ++m) {
        const double* v = values[m].data();
        std::copy(v + (times.size() - 1) * cols, v + times.size() * cols,
                  res.final_rows.begin() + static_cast<std::size_t>(m) * cols);
        for (std::size_t c = 0; c < cells; ++c) sum[c] += v[c];
        res.decay_jumps += jumps[m].first;
        res.dephase_jumps += jumps[m].second;
    }
    const double M = trajectories;
    for (std::size_t c = 0; c < cells; ++c) res.mean[c] = sum[c] / M;

    if (trajectories > 1) {
        std::vector<double> ss(cells, 0.0);
        std::vector<double> cross(times.size(), 0.0);  // centered (mean_n, mean_n2) products
        for (int m = 0; m < trajectories; ++m) {
            const double* v = values[m].data();
            for (std::size_t c = 0; c < cells; ++c) {
                const double d = v[c] - res.mean[c];
                ss[c] += d * d;
            }
            for (std::size_t ti = 0; ti < times.size(); ++ti)
                cross[ti] += (v[ti * cols + layout.mean_n()] - res.mean[ti * cols + layout.mean_n()]) *
                             (v[ti * cols + layout.mean_n2()] - res.mean[ti * cols + layout.mean_n2()]);
            }
        for (std::size_t c = 0; c < cells; ++c)
            res.stderror[c] = std::sqrt(ss[c] / ((M - 1) * M));
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
            const double u = res.mean[ti * cols + layout.mean_n()];
            const double v = res.mean[ti * cols + layout.mean_n2()];
            if (u > 1e-12) {
                const double se_u = res.stderror[ti * cols + layout.mean_n()];
                const double se_v = res.stderror[ti * cols + layout.mean_n2()];
                const double cov_means = cross[ti] / ((M - 1) * M);
                const double gu = -v / (u * u) - 1.0;
                const double gv = 1.0 / u;
                const double var_q =
                    gu * gu * se_u * se_u + gv * gv * se_v * se_v + 2.0 * gu * gv * cov_means;
                res.q_stderr[ti] = std::sqrt(std::max(0.0, var_q));
            }
        }
    }
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const double u = res.mean[ti * cols + layout.mean_n()];
        const double v = res.mean[ti * cols + layout.mean_n2()];
        if (u > 1e-12) res.q[ti] = (v - u * u) / u - 1.0;
        res.max_top_shell = std::max(res.max_top_shell, res.mean[ti * cols + layout.p(layout.n_max)]);
    }
    return res;
}

}  // namespace ryd
