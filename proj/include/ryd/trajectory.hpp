#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ryd/hamiltonian.hpp"
#include "ryd/observables.hpp"
#include "ryd/schedule.hpp"

namespace ryd {

// splitmix64 finalizer; basis of the per-trajectory seed derivation
std::uint64_t mix64(std::uint64_t x);
std::uint64_t trajectory_seed(std::uint64_t base_seed, std::uint64_t index);

// Deterministic uniform stream.  Doubles are built from the high 53 bits so
// the sequence depends only on the (fully specified) mt19937_64 output.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  private:
    std::mt19937_64 engine_;
};

struct IntegratorOptions {
    double dt_safety = 0.35;   // |lambda|_max * dt for the explicit stepper
    double p_step_max = 0.05;  // cap on total jump probability per step
    double dt_max = 0.0;       // optional absolute cap in seconds (0 = unused)
    int output_points = 200;
};

enum class JumpKind { Decay, Dephase };

struct JumpEvent {
    double t = 0.0;
    JumpKind kind = JumpKind::Decay;
    int site = 0;  // 1-based
};

struct TrajectoryState {
    std::vector<cxd> psi;  // unnormalized between jumps
    double t = 0.0;
    RandomStream rng;
    std::vector<JumpEvent> jump_log;

    TrajectoryState(std::size_t dim, std::uint64_t seed)
        : psi(dim, cxd{0.0, 0.0}), rng(seed) {}
};

// Flat per-time observable layout shared by trajectories, ensembles and the
// master-equation oracle: p_0..p_nmax, P0min..P{n_top}min, mean_n, mean_n2,
// norm, profile_1..profile_N.
struct ObservableLayout {
    int n_max = 0;
    int n_top = 0;
    int n_sites = 0;

    std::size_t count() const { return static_cast<std::size_t>(n_max + n_top + 5 + n_sites); }
    std::size_t p(int n) const { return n; }
    std::size_t p_min(int n) const { return n_max + 1 + n; }
    std::size_t mean_n() const { return n_max + n_top + 2; }
    std::size_t mean_n2() const { return mean_n() + 1; }
    std::size_t norm() const { return mean_n() + 2; }
    std::size_t profile(int site) const { return mean_n() + 2 + site; }  // 1-based site
    std::vector<std::string> names() const;

    void flatten(const ObservableSet& obs, double norm2, double* row) const;
};

struct TrajectoryRecord {
    std::vector<double> times;
    ObservableLayout layout;
    std::vector<double> values;  // row-major [times][layout.count()]
    std::vector<JumpEvent> jump_log;

    double at(std::size_t time_index, std::size_t column) const {
        return values[time_index * layout.count() + column];
    }
};

struct EnsembleResult {
    std::vector<double> times;
    ObservableLayout layout;
    int trajectories = 0;
    std::uint64_t base_seed = 0;
    std::vector<double> mean;     // row-major [times][columns]
    std::vector<double> stderror; // standard error of the mean, same shape
    std::vector<double> q;        // ensemble Mandel Q per time
    std::vector<double> q_stderr; // delta-method error of q
    std::size_t decay_jumps = 0;
    std::size_t dephase_jumps = 0;
    double max_top_shell = 0.0;   // max over time of mean p_{n_max}
    std::vector<double> final_rows;  // per-trajectory values at the last time, [M][columns]

    double mean_at(std::size_t time_index, std::size_t column) const {
        return mean[time_index * layout.count() + column];
    }
    double stderr_at(std::size_t time_index, std::size_t column) const {
        return stderror[time_index * layout.count() + column];
    }
};

// Monte-Carlo wavefunction propagator on a fixed basis.  One instance is
// immutable and safe to share across trajectory workers.
class TrajectoryRunner {
  public:
    TrajectoryRunner(const Basis& basis, const HamiltonianParts& parts,
                     const RelaxationParams& relax, const Schedule& schedule,
                     IntegratorOptions opts = {});

    // One deterministic-propagation + jump-decision step.  dt halves
    // internally if the accumulated jump probability exceeds p_step_max.
    void step(TrajectoryState& state, double dt) const;

    TrajectoryRecord run(std::uint64_t seed, std::uint64_t initial_mask = 0) const;

    double base_dt() const { return dt_; }
    const ObservableLayout& layout() const { return layout_; }
    std::vector<double> output_times() const;

  private:
    void rk4(std::vector<cxd>& psi, double t, double dt, std::vector<cxd>& k1,
             std::vector<cxd>& k2, std::vector<cxd>& k3, std::vector<cxd>& k4,
             std::vector<cxd>& tmp) const;
    bool attempt_step(TrajectoryState& state, double dt, int depth) const;

    const Basis& basis_;
    const HamiltonianParts& parts_;
    RelaxationParams relax_;
    Schedule schedule_;  // by value: runners outlive temporary schedules
    IntegratorOptions opts_;
    TargetProjectors targets_;
    ObservableLayout layout_;
    double dt_ = 0.0;
};

// M independent trajectories with deterministically derived seeds, reduced
// in trajectory order; the result does not depend on the worker count.
EnsembleResult run_ensemble(const TrajectoryRunner& runner, int trajectories,
                            std::uint64_t base_seed, int workers = 1,
                            std::uint64_t initial_mask = 0);

// In-place jump operators (exposed for tests).
void apply_decay_jump(std::vector<cxd>& psi, int site, const HamiltonianParts& parts);
void apply_dephase_jump(std::vector<cxd>& psi, int site, const Basis& basis);

}  // namespace ryd
