#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ryd/basis.hpp"

namespace ryd {

// Precomputed bookkeeping for |R_n^min> populations on a given basis.
// n = 1 uses the symmetric superposition over the single-excitation shell.
struct TargetProjectors {
    int n_top = 0;                       // targets computed for n = 0..n_top
    std::vector<bool> feasible;          // geometry admits an equidistant target
    std::vector<std::int64_t> index;     // basis index of |R_n^min>, -1 if absent

    static TargetProjectors make(const Basis& basis, int n_top = 4);
};

// Snapshot of every measured quantity at one time.
struct ObservableSet {
    std::vector<double> p;        // shell probabilities, size n_max + 1
    std::vector<double> p_min;    // target populations P_n^min (NaN if infeasible)
    double mean_n = 0.0;
    double mean_n2 = 0.0;
    double q = 0.0;               // Mandel Q; 0 by convention at <n> = 0
    bool q_defined = true;        // false when the <n> -> 0 convention applied
    std::vector<double> profile;  // <sigma_rr^j>, size N
    double norm = 1.0;            // total probability fed in (diagnostic)
};

// Measurement from a normalized pure state / density matrix.  Throws if the
// norm (trace) deviates from 1 by more than 1e-6.
ObservableSet measure_state(const std::vector<std::complex<double>>& psi, const Basis& basis,
                            const TargetProjectors& targets);
ObservableSet measure_density(const Eigen::MatrixXcd& rho, const Basis& basis,
                              const TargetProjectors& targets);

enum class FitStatus { Ok, SubResolution, Degenerate };

struct GaussianFit {
    double amplitude = 0.0;
    double width = 0.0;  // in units of the lattice constant
    FitStatus status = FitStatus::Degenerate;
};

// Damped least-squares fit of A exp[-(j-jc)^2/(2 w^2)] to the excitation
// profile over sites [jc - half_window, jc + half_window] (clipped to the
// lattice).  Width below 0.5 is flagged sub-resolution; a flat or non-peaked
// profile comes back Degenerate with width NaN.
GaussianFit fit_gaussian_width(const std::vector<double>& profile, int j_center,
                               int half_window = 4);

}  // namespace ryd
