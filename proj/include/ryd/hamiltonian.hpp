#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "ryd/basis.hpp"
#include "ryd/spectrum.hpp"

namespace ryd {

using cxd = std::complex<double>;

// Decay and dephasing rates (rad/s).
struct RelaxationParams {
    double gamma_r = 0.0;  // |r> -> |g> decay
    double gamma_z = 0.0;  // dephasing of |g> <-> |r>

    // total coherence decay rate on g-r
    double gamma_rg() const { return 0.5 * gamma_r + 2.0 * gamma_z; }
    bool dissipative() const { return gamma_r > 0.0 || gamma_z > 0.0; }
};

// Matrix-free representation of H(t)/hbar on the truncated basis:
//   H psi = (diag_interaction - delta(t) * diag_number) o psi
//           - Omega(t) * (coupling * psi)
// coupling is the 0/1 adjacency between configurations differing by one
// excitation, stored CSR; its scalar prefactor enters at apply time.
struct HamiltonianParts {
    std::size_t dim = 0;
    int n_sites = 0;
    std::vector<double> diag_interaction;      // sum over excited pairs of C6/r^6
    std::vector<std::int32_t> diag_number;     // excitation count per configuration
    std::vector<std::int64_t> row_ptr;         // CSR offsets, size dim + 1
    std::vector<std::int32_t> col;             // CSR column indices
    // decay maps: per site j (0-based), pairs (index with j excited,
    // index of the same configuration with j de-excited)
    std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> decay_to;

    std::size_t max_degree() const;
    double max_interaction() const;
};

// Throws std::length_error if the CSR storage would exceed max_nonzeros.
HamiltonianParts build_hamiltonian(const Basis& basis, const SystemGeometry& geom,
                                   std::size_t max_nonzeros = 200'000'000);

// out = H(omega, delta) * psi
void apply_hamiltonian(std::vector<cxd>& out, const std::vector<cxd>& psi, double omega,
                       double delta, const HamiltonianParts& parts);

// out = -i H psi - 1/2 (Gamma_r n + N Gamma_z) psi   (effective non-Hermitian RHS)
void apply_effective_rhs(std::vector<cxd>& out, const std::vector<cxd>& psi, double omega,
                         double delta, const HamiltonianParts& parts,
                         const RelaxationParams& relax);

// Upper bound on the spectral radius of the effective generator, used to set
// the explicit-integrator step.
double spectral_bound(const HamiltonianParts& parts, double omega_max, double delta_abs_max,
                      const RelaxationParams& relax);

}  // namespace ryd
