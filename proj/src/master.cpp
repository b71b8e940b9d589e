#include "ryd/master.hpp"

#include <cmath>
#include <stdexcept>

namespace ryd {

Eigen::MatrixXcd pure_density(const Basis& basis, std::uint64_t mask) {
    const std::int64_t idx = basis.index_of(mask);
    if (idx < 0) throw std::invalid_argument("pure_density: configuration not in basis");
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(basis.size(), basis.size());
    rho(idx, idx) = 1.0;
    return rho;
}

namespace {

struct MasterWorkspace {
    Eigen::MatrixXd coupling;   // dense 0/1 adjacency
    Eigen::VectorXd vdiag;      // interaction diagonal
    Eigen::VectorXd ndiag;      // excitation number diagonal
    Eigen::MatrixXd damp;       // elementwise relaxation: -Gr(n_a+n_b)/2 - 2 Gz hamming
    const HamiltonianParts* parts = nullptr;
    double gamma_r = 0.0;
};

// drho = -i[H, rho] + damp o rho + Gr * refill(rho)
void master_rhs(Eigen::MatrixXcd& out, const Eigen::MatrixXcd& rho, double omega, double delta,
                const MasterWorkspace& ws) {
    const Eigen::VectorXd hdiag = ws.vdiag - delta * ws.ndiag;

    // H rho and rho H with H = diag(hdiag) - omega * coupling
    Eigen::MatrixXcd hrho = hdiag.asDiagonal() * rho;
    hrho.noalias() -= omega * (ws.coupling * rho);
    Eigen::MatrixXcd rhoh = rho * hdiag.asDiagonal();
    rhoh.noalias() -= omega * (rho * ws.coupling);
    out = std::complex<double>(0.0, -1.0) * (hrho - rhoh);

    out += ws.damp.cwiseProduct(rho.real()).cast<std::complex<double>>();
    out += std::complex<double>(0.0, 1.0) * ws.damp.cwiseProduct(rho.imag());

    if (ws.gamma_r > 0.0) {
        for (const auto& site_pairs : ws.parts->decay_to)
            for (const auto& [fa, ta] : site_pairs)
                for (const auto& [fb, tb] : site_pairs) out(ta, tb) += ws.gamma_r * rho(fa, fb);
    }
}

}  // namespace

MasterResult evolve_master(const Basis& basis, const HamiltonianParts& parts,
                           const RelaxationParams& relax, const Schedule& schedule,
                           const Eigen::MatrixXcd& rho0, MasterOptions opts) {
    const std::size_t dim = basis.size();
    if (dim > opts.dim_cap)
        throw std::length_error("evolve_master: basis dimension exceeds the oracle cap");
    if (static_cast<std::size_t>(rho0.rows()) != dim || rho0.rows() != rho0.cols())
        throw std::invalid_argument("evolve_master: rho0 dimension mismatch");

    MasterWorkspace ws;
    ws.parts = &parts;
    ws.gamma_r = relax.gamma_r;
    ws.vdiag = Eigen::Map<const Eigen::VectorXd>(parts.diag_interaction.data(), dim);
    ws.ndiag.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) ws.ndiag[i] = parts.diag_number[i];
    ws.coupling = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::int64_t k = parts.row_ptr[i]; k < parts.row_ptr[i + 1]; ++k)
            ws.coupling(i, parts.col[k]) = 1.0;
    ws.damp.resize(dim, dim);
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < dim; ++b) {
            const int hamming = __builtin_popcountll(basis.state(a) ^ basis.state(b));
            ws.damp(a, b) = -0.5 * relax.gamma_r * (ws.ndiag[a] + ws.ndiag[b]) -
                            2.0 * relax.gamma_z * hamming;
        }

    const double bound =
        spectral_bound(parts, schedule.omega_max(), schedule.delta_abs_max(), relax) +
        relax.gamma_r + 2.0 * relax.gamma_z * basis.n_sites();
    double dt_base = opts.dt_safety / std::max(bound, 1e-30);
    if (opts.dt_max > 0.0) dt_base = std::min(dt_base, opts.dt_max);

    const TargetProjectors targets = TargetProjectors::make(basis);
    MasterResult res;
    res.layout = {basis.n_max(), targets.n_top, basis.n_sites()};
    const int np = std::max(2, opts.output_points);
    res.times.resize(np);
    for (int i = 0; i < np; ++i) res.times[i] = schedule.tau() * i / (np - 1);
    res.values.assign(np * res.layout.count(), 0.0);
    res.q.assign(np, 0.0);
    res.snapshots.reserve(np);

    Eigen::MatrixXcd rho = rho0;
    Eigen::MatrixXcd k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), tmp(dim, dim);

    auto sample = [&](int ti) {
        const ObservableSet obs = measure_density(rho, basis, targets);
        res.layout.flatten(obs, rho.trace().real(), &res.values[ti * res.layout.count()]);
        res.q[ti] = obs.q;
        res.snapshots.push_back(rho);
    };

    sample(0);
    double t = 0.0;
    for (int ti = 1; ti < np; ++ti) {
        const double span = res.times[ti] - t;
        const int n_sub = std::max(1, static_cast<int>(std::ceil(span / dt_base - 1e-12)));
        const double dt = span / n_sub;
        for (int k = 0; k < n_sub; ++k) {
            auto rhs = [&](Eigen::MatrixXcd& out, const Eigen::MatrixXcd& r, double tt) {
                master_rhs(out, r, schedule.omega_at(tt), schedule.delta_at(tt), ws);
            };
            rhs(k1, rho, t);
            tmp = rho + 0.5 * dt * k1;
            rhs(k2, tmp, t + 0.5 * dt);
            tmp = rho + 0.5 * dt * k2;
            rhs(k3, tmp, t + 0.5 * dt);
            tmp = rho + dt * k3;
            rhs(k4, tmp, t + dt);
            rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            rho = 0.5 * (rho + rho.adjoint().eval());  // keep Hermitian
            t += dt;
        }
        t = res.times[ti];
        sample(ti);
    }
    return res;
}

}  // namespace ryd
