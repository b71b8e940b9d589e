#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace ryd {

// One classical arrangement of Rydberg excitations on an N-site chain,
// stored as a bitmask (bit j-1 set <=> site j excited, sites 1..N).
struct Configuration {
    std::uint64_t mask = 0;

    int excitation_count() const { return __builtin_popcountll(mask); }
    bool has_site(int site) const { return (mask >> (site - 1)) & 1ULL; }
    std::vector<int> sites() const;

    // Smallest |i-j| over excited pairs; returns a large sentinel for n < 2.
    int min_pair_distance() const;

    bool operator==(const Configuration&) const = default;
};

constexpr int kNoPairDistance = 1 << 20;

// Exact binomial coefficient; returns 0 for k > n or negative n.
std::uint64_t binomial(long long n, long long k);

// dim H_n^(d) = C(N - (d-1)(n-1), n)
std::uint64_t shell_dimension(int n_sites, int n, int d);

// Lowest-interaction-energy n-excitation arrangement: excitations at
// sites 1 + k*(N-1)/(n-1).  n = 1 has no single-configuration target
// (the relevant state is the symmetric superposition over the shell).
struct TargetState {
    bool symmetric_w = false;  // true only for n = 1
    Configuration config;      // valid when !symmetric_w
};

TargetState target_state(int n_sites, int n);
bool target_feasible(int n_sites, int n);

// Enumerated truncated many-body space: all configurations with
// n <= n_max excitations and pairwise site distance >= d, ordered
// shell-major (by n) then lexicographically by ascending site tuple.
class Basis {
  public:
    static Basis enumerate(int n_sites, int n_max, int d);

    int n_sites() const { return n_sites_; }
    int n_max() const { return n_max_; }
    int min_distance() const { return d_; }
    std::size_t size() const { return states_.size(); }

    const std::vector<std::uint64_t>& states() const { return states_; }
    std::uint64_t state(std::size_t i) const { return states_[i]; }
    Configuration configuration(std::size_t i) const { return {states_[i]}; }

    // Ordinal of a configuration; -1 if not retained.
    std::int64_t index_of(std::uint64_t mask) const;
    bool contains(std::uint64_t mask) const { return index_of(mask) >= 0; }

    // Shell n occupies indices [shell_begin(n), shell_end(n)).
    std::size_t shell_begin(int n) const { return shell_offsets_[n]; }
    std::size_t shell_end(int n) const { return shell_offsets_[n + 1]; }
    int shell_of(std::size_t i) const;

  private:
    int n_sites_ = 0;
    int n_max_ = 0;
    int d_ = 1;
    std::vector<std::uint64_t> states_;
    std::vector<std::size_t> shell_offsets_;  // size n_max + 2
    std::unordered_map<std::uint64_t, std::int64_t> index_;
};

}  // namespace ryd
