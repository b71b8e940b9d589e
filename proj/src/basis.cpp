#include "ryd/basis.hpp"

#include <algorithm>

namespace ryd {

std::vector<int> Configuration::sites() const {
    std::vector<int> out;
    std::uint64_t m = mask;
    while (m) {
        int b = __builtin_ctzll(m);
        out.push_back(b + 1);
        m &= m - 1;
    }
    return out;
}

int Configuration::min_pair_distance() const {
    auto s = sites();
    if (s.size() < 2) return kNoPairDistance;
    int best = kNoPairDistance;
    for (std::size_t i = 1; i < s.size(); ++i) best = std::min(best, s[i] - s[i - 1]);
    return best;
}

std::uint64_t binomial(long long n, long long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (long long i = 1; i <= k; ++i) {
        // exact at every step: r * (n-k+i) is divisible by i
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return r;
}

std::uint64_t shell_dimension(int n_sites, int n, int d) {
    if (n < 0 || d < 1) throw std::invalid_argument("shell_dimension: need n >= 0, d >= 1");
    if (n == 0) return 1;
    return binomial(static_cast<long long>(n_sites) - static_cast<long long>(d - 1) * (n - 1), n);
}

bool target_feasible(int n_sites, int n) {
    if (n < 0 || n > n_sites) return false;
    if (n <= 1) return true;
    return (n_sites - 1) % (n - 1) == 0;
}

TargetState target_state(int n_sites, int n) {
    if (n < 0 || n > n_sites) throw std::invalid_argument("target_state: n out of range");
    if (n == 0) return {false, Configuration{0}};
    if (n == 1) return {true, Configuration{0}};
    if ((n_sites - 1) % (n - 1) != 0)
        throw std::domain_error("target_state: equidistant placement infeasible, (N-1) mod (n-1) != 0");
    const int spacing = (n_sites - 1) / (n - 1);
    std::uint64_t mask = 0;
    for (int k = 0; k < n; ++k) mask |= 1ULL << (k * spacing);
    return {false, Configuration{mask}};
}

namespace {

void enumerate_shell(int n_sites, int n, int d, std::vector<std::uint64_t>& out) {
    if (n == 0) {
        out.push_back(0);
        return;
    }
    // ascending site tuples with consecutive gaps >= d, lexicographic order
    std::vector<int> pick(n);
    // pick[i] holds a 1-based site index
    int level = 0;
    pick[0] = 1;
    while (level >= 0) {
        if (pick[level] > n_sites - (n - 1 - level) * d) {
            --level;
            if (level >= 0) ++pick[level];
            continue;
        }
        if (level == n - 1) {
            std::uint64_t mask = 0;
            for (int i = 0; i < n; ++i) mask |= 1ULL << (pick[i] - 1);
            out.push_back(mask);
            ++pick[level];
        } else {
            pick[level + 1] = pick[level] + d;
            ++level;
        }
    }
}

}  // namespace

Basis Basis::enumerate(int n_sites, int n_max, int d) {
    if (n_sites < 1 || n_sites > 63) throw std::invalid_argument("Basis: N must be in [1, 63]");
    if (n_max < 0 || n_max > n_sites) throw std::invalid_argument("Basis: need 0 <= n_max <= N");
    if (d < 1) throw std::invalid_argument("Basis: need d >= 1");

    Basis b;
    b.n_sites_ = n_sites;
    b.n_max_ = n_max;
    b.d_ = d;
    b.shell_offsets_.assign(n_max + 2, 0);
    for (int n = 0; n <= n_max; ++n) {
        b.shell_offsets_[n] = b.states_.size();
        enumerate_shell(n_sites, n, d, b.states_);
    }
    b.shell_offsets_[n_max + 1] = b.states_.size();
    b.index_.reserve(b.states_.size() * 2);
    for (std::size_t i = 0; i < b.states_.size(); ++i) b.index_[b.states_[i]] = static_cast<std::int64_t>(i);
    return b;
}

std::int64_t Basis::index_of(std::uint64_t mask) const {
    auto it = index_.find(mask);
    return it == index_.end() ? -1 : it->second;
}

int Basis::shell_of(std::size_t i) const {
    return Configuration{states_[i]}.excitation_count();
}

}  // namespace ryd
