#pragma once

// Probability measures on N (truncated to a finite horizon), the two
// power-log weight families, the gap-target construction
// sigma_k = c a_{k+1} exp(-A_k), and site sampling by inverse CDF on
// backward-accumulated tails.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdlab/rng.hpp"

namespace sdlab {

// Weights sigma_1..sigma_K summing to exactly 1 after normalization, with
// tails T_n = sum_{k>=n} sigma_k accumulated backwards (T_1 = 1).
//
// `tail_beyond_horizon` is the analytic mass of the untruncated series past
// K (relative to the normalized weights); 0 when unknown/none. It is
// metadata: the stored weights are a proper probability vector on 1..K.
struct MeasureOnN {
    std::vector<double> sigma;   // sigma[k-1] = sigma_k
    std::vector<double> tails;   // tails[k-1] = T_k
    double tail_beyond_horizon = 0.0;

    std::size_t size() const { return sigma.size(); }

    static MeasureOnN from_weights(std::vector<double> w, double beyond = 0.0) {
        if (w.empty())
            throw std::invalid_argument("MeasureOnN: empty weight vector");
        double total = 0.0;
        for (double x : w) {
            if (!(x >= 0.0) || !std::isfinite(x))
                throw std::invalid_argument("MeasureOnN: weights must be finite and >= 0");
            total += x;
        }
        if (!(total > 0.0))
            throw std::invalid_argument("MeasureOnN: zero total mass");
        MeasureOnN m;
        m.sigma.resize(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) m.sigma[i] = w[i] / total;
        m.tails.resize(w.size());
        double t = 0.0;
        for (std::size_t i = w.size(); i-- > 0;) {
            t += m.sigma[i];
            m.tails[i] = t;
        }
        m.tails[0] = 1.0;
        m.tail_beyond_horizon = beyond / total;
        return m;
    }

    // 1-based atom index for u in (0,1): the atom k whose CDF cell contains
    // u, located by binary search on the tail array (accurate deep in the
    // tail, where forward prefix sums lose digits).
    std::uint32_t sample_index(double u) const {
        const double v = 1.0 - u; // uniform on (0,1) as well
        std::size_t lo = 0, hi = sigma.size();
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (tails[mid] < v)
                hi = mid;
            else
                lo = mid;
        }
        return static_cast<std::uint32_t>(lo + 1);
    }

    std::uint32_t sample(Rng& rng) const { return sample_index(rng.uniform_open01()); }
};

// J i.i.d. atoms of a normalized measure on N.
inline std::vector<std::uint32_t> sample_sites(const MeasureOnN& m, std::size_t J, Rng& rng) {
    std::vector<std::uint32_t> out(J);
    for (auto& s : out) s = m.sample(rng);
    return out;
}

// J i.i.d. points of normalized Lebesgue measure on [0,1].
inline std::vector<double> sample_sites_unit_interval(std::size_t J, Rng& rng) {
    std::vector<double> out(J);
    for (auto& s : out) s = rng.uniform_open01();
    return out;
}

enum class MeasureCase { a, b };

// Case (a): sigma_k = c k^-1 (log(k+2))^-nu, nu > 1.
// Case (b): sigma_k = c k^-a (log(k+2))^-nu, a > 1.
// The log shift k+2 removes the k = 1 singularity without touching
// asymptotics. The share of the untruncated series dropped past K_max is
// estimated by an integral bound and stored as tail_beyond_horizon; it is
// enforced against `tail_tolerance` only in case (b), where a feasible
// horizon can actually meet it (case (a) tails shrink like 1/log K, so no
// desk-scale horizon can).
struct MeasureCaseParams {
    MeasureCase which;
    double a = 0.0;   // case (b) only
    double nu = 0.0;
    std::size_t k_max = 1'000'000;
    double tail_tolerance = 1e-6;
};

inline MeasureOnN measure_case(const MeasureCaseParams& p) {
    if (p.which == MeasureCase::a && !(p.nu > 1.0))
        throw std::invalid_argument("measure_case(a): requires nu > 1");
    if (p.which == MeasureCase::b && !(p.a > 1.0))
        throw std::invalid_argument("measure_case(b): requires a > 1");
    if (p.k_max < 2)
        throw std::invalid_argument("measure_case: K_max too small");

    std::vector<double> w(p.k_max);
    const double a_exp = (p.which == MeasureCase::a) ? 1.0 : p.a;
    for (std::size_t k = 1; k <= p.k_max; ++k)
        w[k - 1] = std::pow(static_cast<double>(k), -a_exp) *
                   std::pow(std::log(static_cast<double>(k) + 2.0), -p.nu);

    // integral bound for the dropped tail sum_{k>K} k^-a log(k+2)^-nu
    const double K = static_cast<double>(p.k_max);
    double beyond;
    if (p.which == MeasureCase::a) {
        beyond = std::pow(std::log(K), 1.0 - p.nu) / (p.nu - 1.0);
    } else {
        beyond = std::pow(K, 1.0 - p.a) / (p.a - 1.0) *
                 std::pow(std::log(K + 2.0), -p.nu);
    }

    auto m = MeasureOnN::from_weights(std::move(w), beyond);
    if (p.which == MeasureCase::b && m.tail_beyond_horizon > p.tail_tolerance)
        throw std::invalid_argument("measure_case: truncated tail above tolerance; raise K_max");
    return m;
}

// Increasing target sequence d_k (doubling-regular) and the derived
// a_k = d_k^-alpha / k, A_n = sum_{k<=n} a_k.
struct GapTargetSpec {
    enum class Family { log_pow, constant };

    Family family = Family::log_pow;
    double gamma = 1.0;   // d_k = (log(k+2))^{gamma/alpha}
    double alpha = 1.0;
    std::size_t k_max = 1'000'000;

    double d(double k) const {
        switch (family) {
            case Family::log_pow: return std::pow(std::log(k + 2.0), gamma / alpha);
            case Family::constant: return 1.0;
        }
        return 1.0;
    }

    double a_k(std::size_t k) const {
        return std::pow(d(static_cast<double>(k)), -alpha) / static_cast<double>(k);
    }
};

// sigma_k = c a_{k+1} exp(-A_k). Horizon checks:
//  - floor d_k >= (log k)^{1/(2 alpha)}: the ratio must not decay across the
//    horizon (rejects d == 1),
//  - divergence of sum a_k: A must still be growing over the last decades,
//  - doubling regularity of d.
// The telescoping remainder of the untruncated series (exp(-A_{K+1}) before
// normalization) is stored as tail_beyond_horizon so tail diagnostics can
// see the full series.
inline MeasureOnN measure_from_gap_target(const GapTargetSpec& spec) {
    const std::size_t K = spec.k_max;
    if (K < 1024)
        throw std::invalid_argument("measure_from_gap_target: horizon too small");

    const auto floor_ratio = [&spec](std::size_t k) {
        return spec.d(static_cast<double>(k)) /
               std::pow(std::log(static_cast<double>(k)), 1.0 / (2.0 * spec.alpha));
    };
    if (floor_ratio(K) < 0.5 * floor_ratio(16))
        throw std::invalid_argument(
            "measure_from_gap_target: floor d_k >= (log k)^{1/(2 alpha)} fails on horizon");
    for (std::size_t k : {K / 2, K}) {
        const double r = spec.d(static_cast<double>(k)) / spec.d(static_cast<double>(k) / 2.0);
        if (r < 0.25 || r > 4.0)
            throw std::invalid_argument("measure_from_gap_target: doubling regularity fails");
    }

    std::vector<double> A(K + 1); // A[k-1] = A_k = sum_{i<=k} a_i
    double acc = 0.0;
    double prev_d = 0.0;
    for (std::size_t k = 1; k <= K + 1; ++k) {
        const double dk = spec.d(static_cast<double>(k));
        if (dk + 1e-15 < prev_d)
            throw std::invalid_argument("measure_from_gap_target: d must be nondecreasing");
        prev_d = dk;
        acc += spec.a_k(k);
        A[k - 1] = acc;
    }
    const double growth = A[K - 1] - A[K / 100 - 1];
    if (!(growth > 1e-3))
        throw std::invalid_argument(
            "measure_from_gap_target: sum d_k^-alpha / k appears convergent");

    std::vector<double> w(K);
    for (std::size_t k = 1; k <= K; ++k)
        w[k - 1] = spec.a_k(k + 1) * std::exp(-A[k - 1]);
    const double beyond = std::exp(-A[K]);

    auto m = MeasureOnN::from_weights(std::move(w), beyond);
    for (std::size_t i = 1; i < m.sigma.size(); ++i)
        if (m.sigma[i] > m.sigma[i - 1] * (1.0 + 1e-12))
            throw std::invalid_argument("measure_from_gap_target: weights not decreasing");
    return m;
}

// Max over n in [n_lo, n_hi] of |sigma_n / (T_n a_{n+1}) - 1|, with T_n
// including the analytic remainder beyond the horizon.
inline double gap_target_tail_identity_deviation(const MeasureOnN& m, const GapTargetSpec& spec,
                                                 std::size_t n_lo, std::size_t n_hi) {
    double worst = 0.0;
    n_hi = std::min(n_hi, m.size() - 1);
    for (std::size_t n = n_lo; n <= n_hi; ++n) {
        const double t_full = m.tails[n - 1] + m.tail_beyond_horizon;
        const double dev = std::abs(m.sigma[n - 1] / (t_full * spec.a_k(n + 1)) - 1.0);
        worst = std::max(worst, dev);
    }
    return worst;
}

} // namespace sdlab
