#include "ryd/hamiltonian.hpp"

#include <algorithm>
#include <stdexcept>

namespace ryd {

std::size_t HamiltonianParts::max_degree() const {
    std::size_t m = 0;
    for (std::size_t i = 0; i < dim; ++i)
        m = std::max(m, static_cast<std::size_t>(row_ptr[i + 1] - row_ptr[i]));
    return m;
}

double HamiltonianParts::max_interaction() const {
    double m = 0.0;
    for (double v : diag_interaction) m = std::max(m, v);
    return m;
}

HamiltonianParts build_hamiltonian(const Basis& basis, const SystemGeometry& geom,
                                   std::size_t max_nonzeros) {
    const std::size_t dim = basis.size();
    const int n_sites = basis.n_sites();

    HamiltonianParts hp;
    hp.dim = dim;
    hp.n_sites = n_sites;
    hp.diag_interaction.resize(dim);
    hp.diag_number.resize(dim);
    hp.row_ptr.assign(dim + 1, 0);
    hp.decay_to.assign(n_sites, {});

    for (std::size_t i = 0; i < dim; ++i) {
        const auto sites = basis.configuration(i).sites();
        hp.diag_number[i] = static_cast<std::int32_t>(sites.size());
        double v = 0.0;
        for (std::size_t p = 0; p < sites.size(); ++p)
            for (std::size_t q = p + 1; q < sites.size(); ++q)
                v += geom.pair_interaction(sites[p], sites[q]);
        hp.diag_interaction[i] = v;
    }

    // adjacency: flip one site, keep only configurations retained in the basis
    std::vector<std::int32_t> cols;
    for (std::size_t i = 0; i < dim; ++i) {
        const std::uint64_t mask = basis.state(i);
        for (int b = 0; b < n_sites; ++b) {
            const std::uint64_t flipped = mask ^ (1ULL << b);
            const std::int64_t j = basis.index_of(flipped);
            if (j < 0) continue;
            cols.push_back(static_cast<std::int32_t>(j));
            if (mask & (1ULL << b))
                hp.decay_to[b].emplace_back(static_cast<std::int32_t>(i),
                                            static_cast<std::int32_t>(j));
        }
        hp.row_ptr[i + 1] = static_cast<std::int64_t>(cols.size());
        if (cols.size() > max_nonzeros)
            throw std::length_error("build_hamiltonian: coupling exceeds memory budget");
    }
    hp.col = std::move(cols);
    return hp;
}

void apply_hamiltonian(std::vector<cxd>& out, const std::vector<cxd>& psi, double omega,
                       double delta, const HamiltonianParts& parts) {
    if (psi.size() != parts.dim || out.size() != parts.dim)
        throw std::invalid_argument("apply_hamiltonian: dimension mismatch");
    for (std::size_t i = 0; i < parts.dim; ++i) {
        cxd acc{0.0, 0.0};
        for (std::int64_t k = parts.row_ptr[i]; k < parts.row_ptr[i + 1]; ++k)
            acc += psi[parts.col[k]];
        out[i] = (parts.diag_interaction[i] - delta * parts.diag_number[i]) * psi[i] - omega * acc;
    }
}

void apply_effective_rhs(std::vector<cxd>& out, const std::vector<cxd>& psi, double omega,
                         double delta, const HamiltonianParts& parts,
                         const RelaxationParams& relax) {
    if (psi.size() != parts.dim || out.size() != parts.dim)
        throw std::invalid_argument("apply_effective_rhs: dimension mismatch");
    const double base_loss = 0.5 * parts.n_sites * relax.gamma_z;
    for (std::size_t i = 0; i < parts.dim; ++i) {
        cxd acc{0.0, 0.0};
        for (std::int64_t k = parts.row_ptr[i]; k < parts.row_ptr[i + 1]; ++k)
            acc += psi[parts.col[k]];
        const cxd h =
            (parts.diag_interaction[i] - delta * parts.diag_number[i]) * psi[i] - omega * acc;
        const double loss = 0.5 * relax.gamma_r * parts.diag_number[i] + base_loss;
        out[i] = cxd(h.imag(), -h.real()) - loss * psi[i];
    }
}

double spectral_bound(const HamiltonianParts& parts, double omega_max, double delta_abs_max,
                      const RelaxationParams& relax) {
    double nmax = 0.0;
    for (auto n : parts.diag_number) nmax = std::max(nmax, static_cast<double>(n));
    return parts.max_interaction() + delta_abs_max * nmax +
           omega_max * static_cast<double>(parts.max_degree()) +
           0.5 * (relax.gamma_r * nmax + relax.gamma_z * parts.n_sites);
}

}  // namespace ryd
