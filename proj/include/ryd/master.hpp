#pragma once

#include <Eigen/Dense>

#include "ryd/hamiltonian.hpp"
#include "ryd/observables.hpp"
#include "ryd/schedule.hpp"
#include "ryd/trajectory.hpp"

namespace ryd {

struct MasterOptions {
    double dt_safety = 0.35;
    double dt_max = 0.0;
    int output_points = 200;
    std::size_t dim_cap = 256;
};

struct MasterResult {
    std::vector<double> times;
    ObservableLayout layout;
    std::vector<double> values;  // row-major [times][layout.count()]; norm column = tr(rho)
    std::vector<double> q;       // Mandel Q per time
    std::vector<Eigen::MatrixXcd> snapshots;  // rho at each output time

    double at(std::size_t time_index, std::size_t column) const {
        return values[time_index * layout.count() + column];
    }
};

// Dense Lindblad integration of d(rho)/dt = -i[H(t), rho] + decay + dephasing
// on the truncated basis.  Brute-force oracle for the trajectory averages;
// throws if the basis exceeds opts.dim_cap.
MasterResult evolve_master(const Basis& basis, const HamiltonianParts& parts,
                           const RelaxationParams& relax, const Schedule& schedule,
                           const Eigen::MatrixXcd& rho0, MasterOptions opts = {});

// Convenience: pure-state initial condition from a configuration mask.
Eigen::MatrixXcd pure_density(const Basis& basis, std::uint64_t mask);

}  // namespace ryd
