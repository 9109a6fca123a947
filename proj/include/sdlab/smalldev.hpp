#pragma once

// Monte Carlo estimation of the small deviation function
// phi(eps) = -log P(||X|| < eps) over a shared-sample eps grid, power/log
// rate regression, and the table of predicted exponents.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdlab/parallel.hpp"
#include "sdlab/regression.hpp"
#include "sdlab/rng.hpp"

namespace sdlab {

struct SmallDevCurve {
    std::vector<double> eps;            // strictly decreasing
    std::vector<std::uint64_t> hits;    // #{ ||X|| < eps }, cumulative over shared samples
    std::uint64_t n_samples = 0;
    std::vector<double> neg_log_p;
    std::vector<double> stderr_neg_log; // delta-method SE of -log(p_hat)
    std::vector<std::uint8_t> censored; // hits == 0

    std::size_t usable_points() const {
        std::size_t n = 0;
        for (std::size_t i = 0; i < eps.size(); ++i)
            if (!censored[i] && neg_log_p[i] > 0.0) ++n;
        return n;
    }
};

// One trial = one path/norm; trial i draws from substream base.substream + i,
// so the curve is identical for any worker count (hit counts are integers,
// merged commutatively).
inline SmallDevCurve estimate_small_dev(const std::function<double(Rng&)>& norm_sampler,
                                        std::vector<double> eps_grid,
                                        std::uint64_t n_samples, RngSpec base,
                                        int workers = 1) {
    if (eps_grid.empty())
        throw std::invalid_argument("estimate_small_dev: empty eps grid");
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (!(eps_grid[i] > 0.0))
            throw std::invalid_argument("estimate_small_dev: eps must be positive");
        if (i > 0 && !(eps_grid[i] < eps_grid[i - 1]))
            throw std::invalid_argument("estimate_small_dev: eps grid must be strictly decreasing");
    }
    if (n_samples < 1000)
        throw std::invalid_argument("estimate_small_dev: n_samples must be >= 1e3");

    const std::size_t ne = eps_grid.size();
    std::vector<std::uint64_t> hits(ne, 0);
    std::mutex merge_mtx;

    parallel_for_blocks(n_samples, workers, 4096, [&](std::uint64_t b, std::uint64_t e) {
        std::vector<std::uint64_t> local(ne, 0);
        for (std::uint64_t i = b; i < e; ++i) {
            Rng rng(base.master_seed, base.substream + i);
            const double v = norm_sampler(rng);
            // eps decreasing: v < eps[k] for all k up to the first failure
            for (std::size_t k = 0; k < ne; ++k) {
                if (v < eps_grid[k])
                    ++local[k];
                else
                    break;
            }
        }
        std::lock_guard<std::mutex> lock(merge_mtx);
        for (std::size_t k = 0; k < ne; ++k) hits[k] += local[k];
    });

    SmallDevCurve c;
    c.eps = std::move(eps_grid);
    c.hits = std::move(hits);
    c.n_samples = n_samples;
    c.neg_log_p.resize(ne);
    c.stderr_neg_log.resize(ne);
    c.censored.resize(ne);
    for (std::size_t k = 0; k < ne; ++k) {
        c.censored[k] = c.hits[k] == 0;
        if (c.censored[k]) {
            c.neg_log_p[k] = std::numeric_limits<double>::quiet_NaN();
            c.stderr_neg_log[k] = std::numeric_limits<double>::quiet_NaN();
        } else {
            const double p = static_cast<double>(c.hits[k]) / static_cast<double>(n_samples);
            c.neg_log_p[k] = -std::log(p);
            c.stderr_neg_log[k] = std::sqrt((1.0 - p) / static_cast<double>(c.hits[k]));
        }
    }
    return c;
}

// Norm values by trial index (for distribution-level comparisons).
inline std::vector<double> sample_norm_values(const std::function<double(Rng&)>& norm_sampler,
                                              std::uint64_t n, RngSpec base, int workers = 1) {
    std::vector<double> out(n);
    parallel_for_blocks(n, workers, 4096, [&](std::uint64_t b, std::uint64_t e) {
        for (std::uint64_t i = b; i < e; ++i) {
            Rng rng(base.master_seed, base.substream + i);
            out[i] = norm_sampler(rng);
        }
    });
    return out;
}

struct RateFit {
    double tau = 0.0;       // phi ~ C eps^-tau (log 1/eps)^theta
    double theta = 0.0;
    double intercept = 0.0; // log C
    double residual_rms = 0.0;
    double tau_lo = 0.0, tau_hi = 0.0;
    std::size_t points_used = 0;
};

// Weighted LS of log(phi) on log(1/eps) and (optionally) log log(1/eps).
// The curve's stderr is propagated to the log response (SE(log phi) =
// stderr / phi) and weights are its inverse square. Censored points and
// points with phi <= 0 are excluded.
inline RateFit fit_rate(const SmallDevCurve& c, bool with_log_factor = false) {
    std::vector<double> x, xl, y, w;
    for (std::size_t k = 0; k < c.eps.size(); ++k) {
        if (c.censored[k] || !(c.neg_log_p[k] > 0.0)) continue;
        const double lx = std::log(1.0 / c.eps[k]);
        if (with_log_factor && lx < 1.0)
            throw std::invalid_argument("fit_rate: log(1/eps) >= 1 required on all points when fitting the log factor");
        x.push_back(lx);
        if (with_log_factor) xl.push_back(std::log(lx));
        y.push_back(std::log(c.neg_log_p[k]));
        const double se = c.stderr_neg_log[k] / c.neg_log_p[k];
        w.push_back(1.0 / (se * se));
    }
    if (x.size() < 4)
        throw std::invalid_argument("fit_rate: fewer than 4 uncensored points");

    std::vector<std::vector<double>> cols;
    cols.push_back(std::vector<double>(x.size(), 1.0));
    cols.push_back(x);
    if (with_log_factor) cols.push_back(xl);
    const auto r = wls_fit(cols, y, w);

    RateFit f;
    f.intercept = r.beta[0];
    f.tau = r.beta[1];
    f.theta = with_log_factor ? r.beta[2] : 0.0;
    f.residual_rms = r.residual_rms;
    f.tau_lo = f.tau - 1.96 * r.stderrs[1];
    f.tau_hi = f.tau + 1.96 * r.stderrs[1];
    f.points_used = x.size();
    return f;
}

// Weighted LS constant of the pinned-exponent model phi = C eps^-tau
// (used where a classical exponent is known and the constant is the point).
inline double fit_constant_at_exponent(const SmallDevCurve& c, double tau) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < c.eps.size(); ++k) {
        if (c.censored[k] || !(c.neg_log_p[k] > 0.0)) continue;
        const double se = c.stderr_neg_log[k] / c.neg_log_p[k];
        const double w = 1.0 / (se * se);
        num += w * (std::log(c.neg_log_p[k]) + tau * std::log(c.eps[k]));
        den += w;
    }
    if (den == 0.0) throw std::invalid_argument("fit_constant_at_exponent: no usable points");
    return std::exp(num / den);
}

// tau from the covering/Hoelder rate 1/tau = 1/alpha - 1/2 + gamma beta.
inline double holder_rate(double beta, double gamma, double alpha) {
    if (!(beta > 0.0) || beta > 1.0)
        throw std::invalid_argument("holder_rate: beta must be in (0,1]");
    if (!(gamma > 0.0))
        throw std::invalid_argument("holder_rate: gamma must be positive");
    if (!(alpha > 0.0) || alpha > 2.0)
        throw std::invalid_argument("holder_rate: alpha must be in (0,2]");
    const double inv = 1.0 / alpha - 0.5 + gamma * beta;
    if (!(inv > 0.0))
        throw std::invalid_argument("holder_rate: nonpositive rate denominator");
    return 1.0 / inv;
}

struct RatePrediction {
    std::string example_id;
    double tau_lo = 0.0, tau_hi = 0.0;       // equal for point predictions
    double theta_lo = 0.0, theta_hi = 0.0;
    enum class Kind { two_sided, upper_bound, lower_bound } kind = Kind::two_sided;
    std::string reference;

    double tau() const { return tau_lo; }
};

struct PredictionParams {
    double alpha = 1.0;
    double hurst = 0.5;
    double q = 2.0;
    double gamma = 1.0;
    double beta = 0.0;
    int d = 1;
};

inline RatePrediction predicted_rate(const std::string& id, const PredictionParams& p) {
    RatePrediction r;
    r.example_id = id;
    const double a = p.alpha;
    if (id == "rl") {
        r.tau_lo = r.tau_hi = 1.0 / p.hurst;
        r.reference = "Prop. 7.5";
    } else if (id == "weighted_levy") {
        r.tau_lo = r.tau_hi = a;
        r.reference = "Eq. (7.9)";
    } else if (id == "sheet") {
        if (!(p.q < std::numeric_limits<double>::infinity()))
            throw std::invalid_argument("predicted_rate(sheet): q < inf required");
        r.tau_lo = r.tau_hi = a;
        r.theta_lo = a * (p.d - 1.0);
        r.theta_hi = a * (p.d - 0.5);
        r.reference = "Eq. (7.11)";
    } else if (id == "som_subcritical") {
        if (!(p.gamma < a))
            throw std::invalid_argument("predicted_rate(som_subcritical): gamma < alpha required");
        r.tau_lo = r.tau_hi = p.gamma;
        r.theta_lo = r.theta_hi = -p.beta;
        r.reference = "Eq. (7.12)";
    } else if (id == "som_critical") {
        const double b = p.beta;
        const double edge = std::max(1.0, a);
        r.reference = "Eq. (7.13)";
        if (b <= edge) {
            r.tau_lo = r.tau_hi = std::numeric_limits<double>::infinity();
        } else if (b < 1.0 + a) {
            r.tau_lo = r.tau_hi = 1.0 / (b / a - 1.0);
        } else if (b == 1.0 + a) {
            r.tau_lo = r.tau_hi = a;
            r.theta_lo = r.theta_hi = 1.0 + a;
        } else {
            r.tau_lo = r.tau_hi = a;
            r.theta_lo = r.theta_hi = 1.0 + a - b;
        }
    } else if (id == "hoelder") {
        r.tau_lo = r.tau_hi = holder_rate(p.beta, p.gamma, a);
        r.reference = "Prop. 7.3";
    } else if (id == "ryznar") {
        if (!(a < 1.0))
            throw std::invalid_argument("predicted_rate(ryznar): alpha < 1 required");
        r.tau_lo = r.tau_hi = a / (1.0 - a);
        r.kind = RatePrediction::Kind::upper_bound;
        r.reference = "Sec. 7.3";
    } else {
        throw std::invalid_argument("predicted_rate: unknown example id '" + id + "'");
    }
    return r;
}

} // namespace sdlab
