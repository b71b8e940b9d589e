#include "ryd/spectrum.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ryd {

double SystemGeometry::c6_over_l6() const {
    const double l = length();
    return c6 / std::pow(l, 6);
}

double SystemGeometry::pair_interaction(int i, int j) const {
    const double r = lattice_const * std::abs(i - j);
    return c6 / std::pow(r, 6);
}

double interaction_sum_exact(int n, const SystemGeometry& geom) {
    if (n < 0) throw std::invalid_argument("interaction_sum_exact: n < 0");
    if (n < 2) return 0.0;
    if (!target_feasible(geom.n_sites, n))
        throw std::domain_error("interaction_sum_exact: equidistant placement infeasible");
    double s = 0.0;
    for (int k = 1; k <= n - 1; ++k) s += k / std::pow(static_cast<double>(n - k), 6);
    return geom.c6_over_l6() * std::pow(static_cast<double>(n - 1), 6) * s;
}

double interaction_sum_approx(int n, const SystemGeometry& geom) {
    if (n < 2) return 0.0;
    return geom.c6_over_l6() * std::pow(static_cast<double>(n - 1), 7);
}

double e_min(int n, double delta, const SystemGeometry& geom) {
    return -n * delta + interaction_sum_exact(n, geom);
}

double e_min_approx(int n, double delta, const SystemGeometry& geom) {
    return -n * delta + interaction_sum_approx(n, geom);
}

double crossing_detuning_exact(int n, const SystemGeometry& geom) {
    if (n < 1) throw std::invalid_argument("crossing_detuning_exact: n < 1");
    // E_{n-1}(d*) = E_n(d*); both linear in delta with slope difference 1
    return interaction_sum_exact(n, geom) - interaction_sum_exact(n - 1, geom);
}

double crossing_detuning_approx(int n, const SystemGeometry& geom) {
    if (n < 1) throw std::invalid_argument("crossing_detuning_approx: n < 1");
    // low crossings have closed forms (0, C6/l^6, 2^7 C6/l^6); beyond that
    // the [(n-1)^7 - (n-2)^7] asymptote applies
    if (n == 1) return 0.0;
    if (n == 2) return geom.c6_over_l6();
    if (n == 3) return 128.0 * geom.c6_over_l6();
    return geom.c6_over_l6() *
           (std::pow(static_cast<double>(n - 1), 7) - std::pow(static_cast<double>(n - 2), 7));
}

double ground_state_detuning(int n, const SystemGeometry& geom) {
    if (n < 0) throw std::invalid_argument("ground_state_detuning: n < 0");
    if (n == 0) return 0.0;
    return geom.c6_over_l6() * std::pow(static_cast<double>(n), 7) / 2.0;
}

EffectiveRabi effective_rabi(int n_to, double omega, const SystemGeometry& geom) {
    const double rootN = std::sqrt(static_cast<double>(geom.n_sites));
    switch (n_to) {
        case 1:
            return {rootN * omega, false, "sqrt(N)*Omega"};
        case 2:
            return {2.0 * omega / rootN, false, "2*Omega/sqrt(N)"};
        case 3:
            return {omega, false, "Omega"};
        case 4: {
            // three-photon coupling; intermediate scale C6/(l/3)^6
            const double shift = geom.c6 / std::pow(geom.length() / 3.0, 6);
            return {std::pow(omega, 3) / (shift * shift), true, "Omega^3/[C6/(l/3)^6]^2"};
        }
        default:
            throw std::domain_error("effective_rabi: transition beyond 3->4 unsupported");
    }
}

double landau_zener_nonadiabatic_prob(double omega_eff, double sweep_rate) {
    if (sweep_rate < 0.0) throw std::invalid_argument("landau_zener: negative sweep rate");
    if (sweep_rate == 0.0) return 0.0;
    return std::exp(-2.0 * M_PI * omega_eff * omega_eff / sweep_rate);
}

std::vector<CrossingRow> crossing_table(int n_upto, const SystemGeometry& geom) {
    std::vector<CrossingRow> rows;
    for (int n = 1; n <= n_upto; ++n) {
        CrossingRow row;
        row.n_from = n - 1;
        row.n_to = n;
        if (target_feasible(geom.n_sites, n) && target_feasible(geom.n_sites, n - 1)) {
            row.delta_cross = crossing_detuning_exact(n, geom);
            row.exact = true;
        } else {
            row.delta_cross = crossing_detuning_approx(n, geom);
            row.exact = false;
        }
        row.omega_rule = n <= 4 ? effective_rabi(n, 1.0, geom).rule : "(2n-5)-photon, no closed form";
        rows.push_back(row);
    }
    return rows;
}

std::vector<LevelDiagramRow> level_diagram(const Basis& basis, const SystemGeometry& geom,
                                           const std::vector<double>& delta_grid) {
    const std::size_t dim = basis.size();
    std::vector<double> interaction(dim, 0.0);
    std::vector<int> nexc(dim, 0);
    for (std::size_t i = 0; i < dim; ++i) {
        const auto sites = basis.configuration(i).sites();
        nexc[i] = static_cast<int>(sites.size());
        double v = 0.0;
        for (std::size_t p = 0; p < sites.size(); ++p)
            for (std::size_t q = p + 1; q < sites.size(); ++q)
                v += geom.pair_interaction(sites[p], sites[q]);
        interaction[i] = v;
    }
    // shell minimum of the interaction part; detuning shifts whole shells
    std::vector<std::size_t> shell_argmin(basis.n_max() + 1);
    for (int n = 0; n <= basis.n_max(); ++n) {
        std::size_t best = basis.shell_begin(n);
        for (std::size_t i = basis.shell_begin(n); i < basis.shell_end(n); ++i)
            if (interaction[i] < interaction[best]) best = i;
        shell_argmin[n] = best;
    }

    std::vector<LevelDiagramRow> rows;
    rows.reserve(delta_grid.size() * dim);
    for (double delta : delta_grid) {
        for (std::size_t i = 0; i < dim; ++i) {
            rows.push_back({delta, nexc[i], -nexc[i] * delta + interaction[i],
                            shell_argmin[nexc[i]] == i, basis.state(i)});
        }
    }
    return rows;
}

}  // namespace ryd
