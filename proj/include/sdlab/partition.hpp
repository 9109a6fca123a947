#pragma once

// Random partitions of N and the entropy-gap machinery: the random diagonal
// lambda_k = (sum_{j <= J, V_j = k} j^{-2/alpha})^{1/2}, its decreasing
// rearrangement, distinct-value counts, entropy-number surrogates, the
// interval-allocation construction, and the gap curve
// G_n = e_n(v) / (n^{-1/alpha + 1/2} e_n(u)).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sdlab/measures.hpp"
#include "sdlab/regression.hpp"
#include "sdlab/rng.hpp"
#include "sdlab/smalldev.hpp"
#include "sdlab/stable.hpp"

namespace sdlab {

namespace detail {

struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

} // namespace detail

struct RandomDiagonal {
    std::vector<std::uint32_t> occupied;     // sites k with lambda_k > 0, ascending
    std::vector<double> lambda;              // lambda_k for the occupied sites
    std::vector<double> lambda_star;         // decreasing rearrangement
    std::vector<std::pair<std::uint64_t, std::uint64_t>> distinct_counts; // (m, N_m)
    std::uint64_t J = 0;
    double alpha = 1.0;
    double lambda_sq_sum = 0.0;              // sum over sites of lambda_k^2
    double weight_sum = 0.0;                 // sum_{j<=J} j^{-2/alpha}
    // Ranks past this are resolution-limited: lambda* there is within a
    // factor 5 of the smallest possible single contribution J^{-1/alpha}.
    std::size_t resolved_rank = 0;

    std::size_t distinct_total() const { return lambda_star.size(); }
};

inline RandomDiagonal random_diagonal(const MeasureOnN& measure, std::uint64_t J,
                                      StableIndex alpha, Rng& rng,
                                      std::vector<std::uint64_t> count_at = {}) {
    if (J < 1000)
        throw std::invalid_argument("random_diagonal: J must be >= 1e3");
    if (alpha.is_gaussian())
        throw std::invalid_argument("random_diagonal: alpha must be in (0,2)");

    std::sort(count_at.begin(), count_at.end());
    const double r = -2.0 / alpha.alpha;

    std::vector<double> acc(measure.size(), 0.0);
    detail::KahanSum wsum;
    std::uint64_t distinct = 0;
    std::size_t next_count = 0;

    RandomDiagonal out;
    out.J = J;
    out.alpha = alpha.alpha;
    for (std::uint64_t j = 1; j <= J; ++j) {
        const std::uint32_t site = measure.sample(rng);
        const double wj = std::pow(static_cast<double>(j), r);
        wsum.add(wj);
        double& cell = acc[site - 1];
        if (cell == 0.0) ++distinct;
        cell += wj;
        while (next_count < count_at.size() && count_at[next_count] == j) {
            out.distinct_counts.emplace_back(j, distinct);
            ++next_count;
        }
    }
    out.weight_sum = wsum.s;

    detail::KahanSum lsum;
    for (std::uint32_t k = 1; k <= measure.size(); ++k) {
        const double v = acc[k - 1];
        if (v > 0.0) {
            out.occupied.push_back(k);
            out.lambda.push_back(std::sqrt(v));
            lsum.add(v);
        }
    }
    out.lambda_sq_sum = lsum.s;

    // rearrangement: descending value, ties broken by ascending site index
    // (stable sort over the ascending-k order)
    out.lambda_star = out.lambda;
    std::stable_sort(out.lambda_star.begin(), out.lambda_star.end(),
                     [](double a, double b) { return a > b; });

    const double floor = 5.0 * std::pow(static_cast<double>(J), -1.0 / alpha.alpha);
    out.resolved_rank = 0;
    while (out.resolved_rank < out.lambda_star.size() &&
           out.lambda_star[out.resolved_rank] >= floor)
        ++out.resolved_rank;
    return out;
}

struct ExpectedDistinct {
    double value = 0.0;            // E N_m over the stored horizon
    double beyond_horizon_bound = 0.0; // <= m * mass beyond the horizon
};

// Exact E N_m = sum_k (1 - (1 - sigma_k)^m) over the horizon.
inline ExpectedDistinct expected_distinct(const MeasureOnN& m, std::uint64_t draws) {
    if (draws < 1)
        throw std::invalid_argument("expected_distinct: m must be >= 1");
    ExpectedDistinct out;
    detail::KahanSum s;
    const double md = static_cast<double>(draws);
    for (double sig : m.sigma)
        s.add(-std::expm1(md * std::log1p(-sig)));
    out.value = s.s;
    out.beyond_horizon_bound = md * m.tail_beyond_horizon;
    return out;
}

// i.i.d. replicates of N_m by direct simulation; replicate r uses substream
// base.substream + r.
inline std::vector<std::uint64_t> distinct_count_mc(const MeasureOnN& m, std::uint64_t draws,
                                                    std::size_t replications, RngSpec base) {
    std::vector<std::uint64_t> out(replications);
    std::vector<std::uint32_t> stamp(m.size(), 0);
    for (std::size_t rep = 0; rep < replications; ++rep) {
        Rng rng(base.master_seed, base.substream + rep);
        const std::uint32_t epoch = static_cast<std::uint32_t>(rep + 1);
        std::uint64_t n = 0;
        for (std::uint64_t j = 0; j < draws; ++j) {
            const std::uint32_t site = m.sample(rng);
            if (stamp[site - 1] != epoch) {
                stamp[site - 1] = epoch;
                ++n;
            }
        }
        out[rep] = n;
    }
    return out;
}

// Diagonal operator description for the entropy surrogates: coefficient
// sequence theta, source exponent p, target exponent q. The p vs p'
// ambiguity in the two displays is deliberately left to the caller; the
// gap curve below is invariant to it (the n-powers cancel).
struct DiagonalSpec {
    std::function<double(std::size_t)> theta; // 1-based
    double p = 2.0;
    double q = 2.0;
};

struct EntropyCurve {
    std::vector<std::size_t> n;
    std::vector<double> e;
};

struct GapCurve {
    std::vector<std::size_t> n;
    std::vector<double> g;
};

namespace detail {

// sup over grid pairs n >= k of (n/k)^witness * s(n)/s(k); the sequences of
// interest keep this O(1), anything not tending to zero fast enough trips
// the cap.
inline double regularity_ratio(const std::function<double(std::size_t)>& s,
                               const std::vector<std::size_t>& grid, double witness) {
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i; j < grid.size(); ++j) {
            const double r = std::pow(static_cast<double>(grid[j]) / grid[i], witness) *
                             s(grid[j]) / s(grid[i]);
            worst = std::max(worst, r);
        }
    return worst;
}

inline constexpr double kRegularityCap = 32.0;

} // namespace detail

// Entropy-number surrogate e_n = theta_n n^{1/q - 1/p} (asymptotic orders,
// constants set to 1). Rejects sequences that are not positive
// nonincreasing or fail the fixed-witness regularity check
// sup (n/k)^{1/q} theta_n/theta_k <= cap on the grid.
inline EntropyCurve kuhn_entropy(const DiagonalSpec& spec,
                                 const std::vector<std::size_t>& n_grid) {
    if (n_grid.empty()) throw std::invalid_argument("kuhn_entropy: empty grid");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1) throw std::invalid_argument("kuhn_entropy: grid must be >= 1");
        if (i > 0 && n_grid[i] <= n_grid[i - 1])
            throw std::invalid_argument("kuhn_entropy: grid must be strictly increasing");
        const double t = spec.theta(n_grid[i]);
        if (!(t > 0.0) || !std::isfinite(t))
            throw std::invalid_argument("kuhn_entropy: theta must be positive and finite");
        if (i > 0 && spec.theta(n_grid[i]) > spec.theta(n_grid[i - 1]) * (1.0 + 1e-12))
            throw std::invalid_argument("kuhn_entropy: theta must be nonincreasing");
    }
    const double witness = 1.0 / spec.q;
    const double reg = detail::regularity_ratio(spec.theta, n_grid, witness);
    if (reg > detail::kRegularityCap)
        throw std::invalid_argument(
            "kuhn_entropy: regularity check failed (theta does not decay like n^-" +
            std::to_string(witness) + " on the grid; ratio " + std::to_string(reg) + ")");

    EntropyCurve c;
    c.n = n_grid;
    c.e.reserve(n_grid.size());
    const double expo = 1.0 / spec.q - 1.0 / spec.p;
    for (std::size_t n : n_grid)
        c.e.push_back(spec.theta(n) * std::pow(static_cast<double>(n), expo));
    return c;
}

struct IntervalAllocation {
    std::vector<std::size_t> n;
    std::vector<double> a_sizes;   // |A_n| = c d_n^-alpha / n
    std::vector<double> e_u;       // theta_n n^{1/alpha - 1/p}
    std::vector<double> e_u_inf;   // theta_n |A_n|^{-1/alpha} n^{-1/p}
    std::vector<double> gap_bound; // c^{-1/alpha} d_n
    double c = 0.0;                // packing constant, sum |A_n| <= 1
};

// Disjoint-interval construction: |A_n| = c d_n^-alpha n^-1 with c chosen so
// the lengths pack into [0,1]. Requires sum d_n^-alpha / n < inf (checked on
// the horizon: the last doubling must contribute < 1% of the total).
// theta defaults to 2^-n, which satisfies both regularity witnesses for any
// admissible d.
inline IntervalAllocation interval_allocation(const GapTargetSpec& target, double p,
                                              const std::vector<std::size_t>& n_grid,
                                              std::function<double(std::size_t)> theta = {}) {
    if (n_grid.empty()) throw std::invalid_argument("interval_allocation: empty grid");
    if (!theta)
        theta = [](std::size_t n) { return std::pow(2.0, -static_cast<double>(n)); };

    const std::size_t horizon =
        std::max<std::size_t>(target.k_max, n_grid.back());
    detail::KahanSum total, last_doubling;
    for (std::size_t k = 1; k <= horizon; ++k) {
        const double a = target.a_k(k);
        total.add(a);
        if (k > horizon / 2) last_doubling.add(a);
    }
    if (last_doubling.s > 0.01 * total.s)
        throw std::invalid_argument(
            "interval_allocation: sum d_n^-alpha/n diverges; intervals cannot fit in [0,1]");
    const double c = 1.0 / total.s;

    const double alpha = target.alpha;
    const auto theta_ainv = [&](std::size_t n) {
        const double an = c * target.a_k(n);
        return theta(n) * std::pow(an, -1.0 / alpha);
    };
    if (detail::regularity_ratio(theta, n_grid, 1.0 / alpha) > detail::kRegularityCap)
        throw std::invalid_argument("interval_allocation: theta fails the regularity witness");
    if (detail::regularity_ratio(theta_ainv, n_grid, 1.0 / (2.0 * alpha)) >
        detail::kRegularityCap)
        throw std::invalid_argument(
            "interval_allocation: theta |A_n|^{-1/alpha} fails the regularity witness");

    IntervalAllocation out;
    out.n = n_grid;
    out.c = c;
    for (std::size_t n : n_grid) {
        const double an = c * target.a_k(n);
        out.a_sizes.push_back(an);
        out.e_u.push_back(theta(n) *
                          std::pow(static_cast<double>(n), 1.0 / alpha - 1.0 / p));
        out.e_u_inf.push_back(theta(n) * std::pow(an, -1.0 / alpha) *
                              std::pow(static_cast<double>(n), -1.0 / p));
        out.gap_bound.push_back(std::pow(c, -1.0 / alpha) * target.d(static_cast<double>(n)));
    }
    return out;
}

// G_n = e_n(v) / (n^{-1/alpha+1/2} e_n(u)) with the surrogates
// e_n(v) = lambda*_n n^{1/2-1/p} and e_n(u) = theta_n n^{1/alpha-1/p};
// the n-powers and 1/p cancel identically, so G_n = lambda*_n / theta_n.
inline GapCurve gap_curve(const DiagonalSpec& theta_spec, const RandomDiagonal& diag,
                          StableIndex alpha, const std::vector<std::size_t>& n_grid) {
    GapCurve out;
    const double inv_a = 1.0 / alpha.alpha;
    for (std::size_t n : n_grid) {
        if (n < 1 || n > diag.resolved_rank)
            throw std::invalid_argument("gap_curve: n beyond the resolved range of lambda*");
        const double e_v = diag.lambda_star[n - 1] *
                           std::pow(static_cast<double>(n), 0.5 - 1.0 / theta_spec.p);
        const double e_u = theta_spec.theta(n) *
                           std::pow(static_cast<double>(n), inv_a - 1.0 / theta_spec.p);
        const double scale = std::pow(static_cast<double>(n), -inv_a + 0.5);
        out.n.push_back(n);
        out.g.push_back(e_v / (scale * e_u));
    }
    return out;
}

// Least squares of log lambda*_k on log k (and log log k when flagged) over
// k in [k_lo, k_hi]. Unweighted; the CI is scaled by the residual variance.
inline RateFit fit_rearrangement(const RandomDiagonal& diag, std::size_t k_lo,
                                 std::size_t k_hi, bool with_log_factor = false) {
    if (k_lo < 1 || k_hi < k_lo)
        throw std::invalid_argument("fit_rearrangement: bad k range");
    k_hi = std::min(k_hi, diag.lambda_star.size());
    std::vector<double> x, xl, y;
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        const double v = diag.lambda_star[k - 1];
        if (!(v > 0.0)) break;
        x.push_back(std::log(static_cast<double>(k)));
        if (with_log_factor) xl.push_back(std::log(std::log(static_cast<double>(k))));
        y.push_back(std::log(v));
    }
    if (x.size() < 4)
        throw std::invalid_argument("fit_rearrangement: fewer than 4 points");

    std::vector<std::vector<double>> cols;
    cols.push_back(std::vector<double>(x.size(), 1.0));
    cols.push_back(x);
    if (with_log_factor) cols.push_back(xl);
    const std::vector<double> w(x.size(), 1.0);
    const auto r = wls_fit(cols, y, w);

    RateFit f;
    f.intercept = r.beta[0];
    f.tau = r.beta[1]; // slope of the rearrangement (negative for decay)
    f.theta = with_log_factor ? r.beta[2] : 0.0;
    f.residual_rms = r.residual_rms;
    const double dof = static_cast<double>(x.size()) /
                       std::max<double>(1.0, static_cast<double>(x.size()) - cols.size());
    const double se = r.stderrs[1] * r.residual_rms * std::sqrt(dof);
    f.tau_lo = f.tau - 1.96 * se;
    f.tau_hi = f.tau + 1.96 * se;
    f.points_used = x.size();
    return f;
}

} // namespace sdlab
