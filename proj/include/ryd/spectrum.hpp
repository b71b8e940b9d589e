#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ryd/basis.hpp"

namespace ryd {

// Chain geometry and interaction strength.  All rates/energies are angular
// frequencies (rad/s), lengths in micrometers, c6 in rad/s * um^6.
struct SystemGeometry {
    int n_sites = 1;
    double lattice_const = 0.532;       // um
    double c6 = 0.0;                    // rad/s * um^6

    double length() const { return lattice_const * (n_sites - 1); }
    double c6_over_l6() const;
    double pair_interaction(int i, int j) const;  // c6 / (a|i-j|)^6
};

// Interaction energy of the maximally separated n-excitation arrangement
// (the -n*delta part excluded):  C6 (n-1)^6 / l^6 * sum_k k/(n-k)^6.
double interaction_sum_exact(int n, const SystemGeometry& geom);
double interaction_sum_approx(int n, const SystemGeometry& geom);  // C6 (n-1)^7 / l^6

// E_n^min(delta) in both forms.
double e_min(int n, double delta, const SystemGeometry& geom);
double e_min_approx(int n, double delta, const SystemGeometry& geom);

// Detuning at which E_{n-1}^min and E_n^min cross.
double crossing_detuning_exact(int n, const SystemGeometry& geom);
double crossing_detuning_approx(int n, const SystemGeometry& geom);

// Detuning at which |R_n^min> is deepest below its neighbors: C6 n^7 / (2 l^6).
double ground_state_detuning(int n, const SystemGeometry& geom);

// Collective coupling of the (n-1) -> n avoided crossing.  The 3 -> 4 value
// is a three-photon order-of-magnitude estimate (unit prefactor), never fed
// into dynamics.
struct EffectiveRabi {
    double value = 0.0;
    bool order_of_magnitude_only = false;
    std::string rule;  // e.g. "sqrt(N)*Omega"
};

EffectiveRabi effective_rabi(int n_to, double omega, const SystemGeometry& geom);

// exp(-2 pi |Omega_eff|^2 / alpha); alpha = 0 is the adiabatic limit (0).
double landau_zener_nonadiabatic_prob(double omega_eff, double sweep_rate);

struct CrossingRow {
    int n_from = 0;
    int n_to = 0;
    double delta_cross = 0.0;  // exact when geometry feasible, else approx
    bool exact = false;
    std::string omega_rule;
};

std::vector<CrossingRow> crossing_table(int n_upto, const SystemGeometry& geom);

// Classical (Omega -> 0) energies of every retained configuration on a
// detuning grid, with the per-shell minimum flagged.
struct LevelDiagramRow {
    double delta = 0.0;
    int n = 0;
    double energy = 0.0;
    bool is_shell_min = false;
    std::uint64_t mask = 0;
};

std::vector<LevelDiagramRow> level_diagram(const Basis& basis, const SystemGeometry& geom,
                                           const std::vector<double>& delta_grid);

}  // namespace ryd
