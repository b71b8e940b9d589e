#include "ryd/observables.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ryd {

namespace {
constexpr double kNormTol = 1e-6;
constexpr double kMeanNFloor = 1e-12;
const double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

TargetProjectors TargetProjectors::make(const Basis& basis, int n_top) {
    TargetProjectors t;
    t.n_top = std::min(n_top, basis.n_max());
    t.feasible.assign(t.n_top + 1, false);
    t.index.assign(t.n_top + 1, -1);
    for (int n = 0; n <= t.n_top; ++n) {
        if (!target_feasible(basis.n_sites(), n)) continue;
        if (n == 1) {
            t.feasible[1] = true;  // symmetric superposition over the n = 1 shell
            continue;
        }
        const auto ts = target_state(basis.n_sites(), n);
        const std::int64_t idx = basis.index_of(ts.config.mask);
        if (idx >= 0) {
            t.feasible[n] = true;
            t.index[n] = idx;
        }
    }
    return t;
}

namespace {

// shared tail: shells/targets/moments from per-configuration weights plus a
// target-amplitude functional
template <typename WeightAt, typename TargetAmp>
ObservableSet measure_impl(const Basis& basis, const TargetProjectors& targets, double total,
                           WeightAt&& weight, TargetAmp&& target_amp) {
    if (std::abs(total - 1.0) > kNormTol)
        throw std::invalid_argument("measure: state is not normalized");

    const int n_max = basis.n_max();
    const int n_sites = basis.n_sites();
    ObservableSet obs;
    obs.norm = total;
    obs.p.assign(n_max + 1, 0.0);
    obs.profile.assign(n_sites, 0.0);

    for (std::size_t i = 0; i < basis.size(); ++i) {
        const double w = weight(i);
        std::uint64_t m = basis.state(i);
        obs.p[__builtin_popcountll(m)] += w;
        while (m) {
            obs.profile[__builtin_ctzll(m)] += w;
            m &= m - 1;
        }
    }

    double mn = 0.0, mn2 = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        mn += n * obs.p[n];
        mn2 += static_cast<double>(n) * n * obs.p[n];
    }
    obs.mean_n = mn;
    obs.mean_n2 = mn2;
    if (mn > kMeanNFloor) {
        obs.q = (mn2 - mn * mn) / mn - 1.0;
        obs.q_defined = true;
    } else {
        obs.q = 0.0;
        obs.q_defined = false;
    }

    obs.p_min.assign(targets.n_top + 1, kNaN);
    for (int n = 0; n <= targets.n_top; ++n)
        if (targets.feasible[n]) obs.p_min[n] = target_amp(n);
    return obs;
}

}  // namespace

ObservableSet measure_state(const std::vector<std::complex<double>>& psi, const Basis& basis,
                            const TargetProjectors& targets) {
    if (psi.size() != basis.size()) throw std::invalid_argument("measure_state: size mismatch");
    double total = 0.0;
    for (const auto& a : psi) total += std::norm(a);

    auto weight = [&](std::size_t i) { return std::norm(psi[i]); };
    auto target_amp = [&](int n) {
        if (n == 1) {
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t i = basis.shell_begin(1); i < basis.shell_end(1); ++i) acc += psi[i];
            return std::norm(acc) / basis.n_sites();
        }
        return std::norm(psi[static_cast<std::size_t>(targets.index[n])]);
    };
    return measure_impl(basis, targets, total, weight, target_amp);
}

ObservableSet measure_density(const Eigen::MatrixXcd& rho, const Basis& basis,
                              const TargetProjectors& targets) {
    if (static_cast<std::size_t>(rho.rows()) != basis.size() || rho.rows() != rho.cols())
        throw std::invalid_argument("measure_density: size mismatch");
    const double total = rho.trace().real();

    auto weight = [&](std::size_t i) { return rho(i, i).real(); };
    auto target_amp = [&](int n) {
        if (n == 1) {
            // <R_1| rho |R_1> with |R_1> uniform over the shell
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t i = basis.shell_begin(1); i < basis.shell_end(1); ++i)
                for (std::size_t j = basis.shell_begin(1); j < basis.shell_end(1); ++j)
                    acc += rho(i, j);
            return acc.real() / basis.n_sites();
        }
        const auto i = static_cast<Eigen::Index>(targets.index[n]);
        return rho(i, i).real();
    };
    return measure_impl(basis, targets, total, weight, target_amp);
}

GaussianFit fit_gaussian_width(const std::vector<double>& profile, int j_center, int half_window) {
    const int n_sites = static_cast<int>(profile.size());
    const int lo = std::max(1, j_center - half_window);
    const int hi = std::min(n_sites, j_center + half_window);

    GaussianFit fit;
    fit.width = kNaN;
    if (hi - lo + 1 < 3) return fit;

    const double peak = profile[j_center - 1];
    double flat = 0.0;
    for (int j = lo; j <= hi; ++j) flat = std::max(flat, std::abs(profile[j - 1] - peak));
    if (peak <= 0.0 || flat < 1e-14) return fit;  // flat or empty window

    double a = peak, w = 1.0;
    double lambda = 1e-3;
    auto chi2 = [&](double av, double wv) {
        double c = 0.0;
        for (int j = lo; j <= hi; ++j) {
            const double e = std::exp(-0.5 * (j - j_center) * (j - j_center) / (wv * wv));
            const double r = profile[j - 1] - av * e;
            c += r * r;
        }
        return c;
    };

    double best = chi2(a, w);
    for (int iter = 0; iter < 200; ++iter) {
        // normal equations for parameters (A, w)
        double jaa = 0.0, jaw = 0.0, jww = 0.0, ga = 0.0, gw = 0.0;
        for (int j = lo; j <= hi; ++j) {
            const double x2 = static_cast<double>(j - j_center) * (j - j_center);
            const double e = std::exp(-0.5 * x2 / (w * w));
            const double r = profile[j - 1] - a * e;
            const double da = e;
            const double dw = a * e * x2 / (w * w * w);
            jaa += da * da;
            jaw += da * dw;
            jww += dw * dw;
            ga += da * r;
            gw += dw * r;
        }
        const double m00 = jaa * (1.0 + lambda), m11 = jww * (1.0 + lambda);
        const double det = m00 * m11 - jaw * jaw;
        if (std::abs(det) < 1e-300) break;
        const double step_a = (m11 * ga - jaw * gw) / det;
        const double step_w = (m00 * gw - jaw * ga) / det;
        const double na = a + step_a;
        double nw = std::abs(w + step_w);
        if (nw < 1e-3) nw = 1e-3;
        const double c = chi2(na, nw);
        if (c < best) {
            const bool converged =
                std::abs(step_a) < 1e-12 * (std::abs(a) + 1e-30) && std::abs(step_w) < 1e-12;
            a = na;
            w = nw;
            best = c;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (converged) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }

    if (!(a > 0.0) || !std::isfinite(w) || w > 4.0 * (hi - lo + 1)) return fit;  // no peak
    fit.amplitude = a;
    fit.width = w;
    fit.status = w < 0.5 ? FitStatus::SubResolution : FitStatus::Ok;
    return fit;
}

}  // namespace ryd
