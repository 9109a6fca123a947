#pragma once

// Concrete SaS processes as path samplers on uniform grids over [0,1]^d:
// a direct-increment sampler (exact one-dimensional marginals) and the
// conditionally-Gaussian series sampler, plus the sum-of-maxima array.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sdlab/measures.hpp"
#include "sdlab/rng.hpp"
#include "sdlab/stable.hpp"

namespace sdlab {

// Exceeding a configured memory/level budget is reported distinctly from
// invalid parameters (the CLI maps it to its own exit code).
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct KernelSpec {
    enum class Type { riemann_liouville, levy_motion, weighted_levy, sheet };

    Type type = Type::levy_motion;
    double hurst = 0.5;                        // riemann_liouville
    int dim = 1;                               // sheet
    std::function<double(double)> weight;      // weighted_levy: rho(t)

    static KernelSpec riemann_liouville(double H) {
        if (!(H > 0.0))
            throw std::invalid_argument("KernelSpec: Hurst index must be positive");
        KernelSpec k;
        k.type = Type::riemann_liouville;
        k.hurst = H;
        return k;
    }
    static KernelSpec levy_motion() { return KernelSpec{}; }
    static KernelSpec weighted_levy(std::function<double(double)> rho) {
        KernelSpec k;
        k.type = Type::weighted_levy;
        k.weight = std::move(rho);
        return k;
    }
    static KernelSpec sheet(int d) {
        if (d < 1) throw std::invalid_argument("KernelSpec: sheet dimension must be >= 1");
        KernelSpec k;
        k.type = Type::sheet;
        k.dim = d;
        return k;
    }

    int domain_dim() const { return type == Type::sheet ? dim : 1; }
};

// Uniform evaluation grid: points (i_1,...,i_d)/G with i_a in 1..G,
// values stored row-major (last axis fastest).
struct UniformGrid {
    int cells = 256;
    int dim = 1;

    std::size_t total() const {
        std::size_t t = 1;
        for (int a = 0; a < dim; ++a) t *= static_cast<std::size_t>(cells);
        return t;
    }
    double point(int i) const { return static_cast<double>(i + 1) / cells; }
};

struct PathSample {
    UniformGrid grid;
    std::vector<double> values;
    // series-sampler bias metadata
    bool truncation_warning = false;
    double series_tail_share = 0.0;

    double at(int i) const { return values[static_cast<std::size_t>(i)]; }
    double back() const { return values.back(); }
};

namespace detail {

inline void check_rl_integrable(double H, double alpha) {
    if (H <= 1.0 / alpha - 1.0)
        throw std::invalid_argument("riemann_liouville: H <= 1/alpha - 1 (kernel not integrable)");
}

// Lag weights for the RL increment sampler on a uniform grid: the kernel's
// alpha-mass over each cell has a closed-form antiderivative, so the cell
// is integrated exactly (midpoint evaluation blows up near s = t when
// H < 1/alpha).
inline std::vector<double> rl_lag_weights(int G, double H, double alpha) {
    const double Ha = H * alpha;
    std::vector<double> w(static_cast<std::size_t>(G));
    const double scale = 1.0 / (Ha * std::pow(static_cast<double>(G), Ha));
    for (int l = 0; l < G; ++l) {
        const double cell =
            (std::pow(l + 1.0, Ha) - std::pow(static_cast<double>(l), Ha)) * scale;
        w[static_cast<std::size_t>(l)] = std::pow(cell, 1.0 / alpha);
    }
    return w;
}

// In-place prefix sums along every axis of a d-dimensional row-major array.
inline void lattice_prefix_sums(std::vector<double>& v, int G, int d) {
    const std::size_t n = v.size();
    std::size_t stride = 1;
    for (int axis = d - 1; axis >= 0; --axis) {
        for (std::size_t base = 0; base < n; ++base) {
            const std::size_t idx_on_axis = (base / stride) % static_cast<std::size_t>(G);
            if (idx_on_axis == 0) continue;
            v[base] += v[base - stride];
        }
        stride *= static_cast<std::size_t>(G);
    }
}

} // namespace detail

// X(t_i) = sum_k c_{ik} xi_k with i.i.d. standard SaS xi and cell
// coefficients c_{ik} = (integral of |K(t_i, .)|^alpha over cell k)^{1/alpha},
// making every one-dimensional marginal exact in law. Exact in law at grid
// points (jointly) for levy_motion and sheet.
inline PathSample sample_path_increments(const KernelSpec& kernel, StableIndex alpha,
                                         const UniformGrid& grid, Rng& rng) {
    if (grid.dim != kernel.domain_dim())
        throw std::invalid_argument("sample_path_increments: grid dimension mismatch");
    const int G = grid.cells;
    PathSample out;
    out.grid = grid;

    switch (kernel.type) {
        case KernelSpec::Type::levy_motion:
        case KernelSpec::Type::weighted_levy: {
            out.values.resize(static_cast<std::size_t>(G));
            const double cell = std::pow(1.0 / G, 1.0 / alpha.alpha);
            double acc = 0.0;
            for (int i = 0; i < G; ++i) {
                acc += cell * sample_sas(alpha, rng);
                out.values[static_cast<std::size_t>(i)] = acc;
            }
            if (kernel.type == KernelSpec::Type::weighted_levy) {
                if (!kernel.weight)
                    throw std::invalid_argument("weighted_levy: missing weight function");
                for (int i = 0; i < G; ++i)
                    out.values[static_cast<std::size_t>(i)] *= kernel.weight(grid.point(i));
            }
            break;
        }
        case KernelSpec::Type::riemann_liouville: {
            detail::check_rl_integrable(kernel.hurst, alpha.alpha);
            const auto w = detail::rl_lag_weights(G, kernel.hurst, alpha.alpha);
            std::vector<double> xi(static_cast<std::size_t>(G));
            for (auto& x : xi) x = sample_sas(alpha, rng);
            out.values.assign(static_cast<std::size_t>(G), 0.0);
            for (int i = 0; i < G; ++i) {
                double acc = 0.0;
                for (int k = 0; k <= i; ++k) acc += w[static_cast<std::size_t>(i - k)] * xi[static_cast<std::size_t>(k)];
                out.values[static_cast<std::size_t>(i)] = acc;
            }
            break;
        }
        case KernelSpec::Type::sheet: {
            const std::size_t n = grid.total();
            out.values.resize(n);
            const double cell = std::pow(std::pow(1.0 / G, kernel.dim), 1.0 / alpha.alpha);
            for (std::size_t c = 0; c < n; ++c) out.values[c] = cell * sample_sas(alpha, rng);
            detail::lattice_prefix_sums(out.values, G, kernel.dim);
            break;
        }
    }
    return out;
}

// Arrival times and sample sites driving the series representation.
struct LePageStream {
    std::vector<double> gammas;   // strictly increasing, Gamma_1 > 0
    std::vector<double> sites;    // J * site_dim coordinates in [0,1]^site_dim
    int site_dim = 1;

    std::size_t terms() const { return gammas.size(); }
    double site(std::size_t j, int axis) const {
        return sites[j * static_cast<std::size_t>(site_dim) + static_cast<std::size_t>(axis)];
    }
};

inline LePageStream make_lepage_stream(std::size_t J, int site_dim, Rng& rng) {
    if (J == 0) throw std::invalid_argument("make_lepage_stream: J must be >= 1");
    LePageStream s;
    s.site_dim = site_dim;
    s.gammas = gamma_arrivals(J, rng);
    s.sites = sample_sites_unit_interval(J * static_cast<std::size_t>(site_dim), rng);
    return s;
}

// Default truncation guard: paths built from fewer terms carry a warning.
inline std::size_t lepage_j_min(StableIndex alpha) {
    return alpha.alpha >= 1.0 ? 10'000 : 1'000;
}

// Neglected share of sum_j j^{-2/alpha} past J (integral bound over retained
// sum), reported on every series path as its bias certificate.
inline double lepage_tail_share(std::size_t J, StableIndex alpha) {
    const double r = 2.0 / alpha.alpha;
    double retained = 0.0;
    for (std::size_t j = 1; j <= std::min<std::size_t>(J, 100'000); ++j)
        retained += std::pow(static_cast<double>(j), -r);
    if (J > 100'000)
        retained += (std::pow(1e5, 1.0 - r) - std::pow(static_cast<double>(J), 1.0 - r)) / (r - 1.0);
    const double tail = std::pow(static_cast<double>(J), 1.0 - r) / (r - 1.0);
    return tail / retained;
}

// Y(t) = sqrt(2) * (c_alpha/2) * sigma(S)^{1/alpha}
//        * sum_{j<=J} Gamma_j^{-1/alpha} xi_j K(t, V_j),  xi_j i.i.d. N(0,1).
// The constant c_alpha/2 = Gamma(1-alpha/2)^{-1/alpha} is the one under
// which the conditionally-Gaussian mixture reproduces the SaS law; it is
// pinned by the characteristic-function tests. sigma(S) = 1 for every
// kernel here (Lebesgue control measure on [0,1]^d).
inline PathSample sample_path_lepage(const KernelSpec& kernel, StableIndex alpha,
                                     const LePageStream& stream, const UniformGrid& grid,
                                     Rng& rng) {
    if (alpha.is_gaussian())
        throw std::invalid_argument("sample_path_lepage: alpha = 2 must use sample_path_increments");
    if (grid.dim != kernel.domain_dim())
        throw std::invalid_argument("sample_path_lepage: grid dimension mismatch");
    if (stream.site_dim != kernel.domain_dim())
        throw std::invalid_argument("sample_path_lepage: stream site dimension mismatch");

    const std::size_t J = stream.terms();
    const int G = grid.cells;
    const double pref = std::sqrt(2.0) * mixture_constant(alpha);
    const double inv_alpha = 1.0 / alpha.alpha;

    PathSample out;
    out.grid = grid;
    out.truncation_warning = J < lepage_j_min(alpha);
    out.series_tail_share = lepage_tail_share(J, alpha);

    switch (kernel.type) {
        case KernelSpec::Type::levy_motion:
        case KernelSpec::Type::weighted_levy: {
            // bucket each term at the first grid point >= V_j, then prefix-sum
            std::vector<double> bucket(static_cast<std::size_t>(G), 0.0);
            for (std::size_t j = 0; j < J; ++j) {
                const double cj = std::pow(stream.gammas[j], -inv_alpha) * rng.normal();
                const double v = stream.site(j, 0);
                int i0 = static_cast<int>(std::ceil(v * G)) - 1;
                i0 = std::clamp(i0, 0, G - 1);
                bucket[static_cast<std::size_t>(i0)] += cj;
            }
            out.values.resize(static_cast<std::size_t>(G));
            double acc = 0.0;
            for (int i = 0; i < G; ++i) {
                acc += bucket[static_cast<std::size_t>(i)];
                out.values[static_cast<std::size_t>(i)] = pref * acc;
            }
            if (kernel.type == KernelSpec::Type::weighted_levy) {
                if (!kernel.weight)
                    throw std::invalid_argument("weighted_levy: missing weight function");
                for (int i = 0; i < G; ++i)
                    out.values[static_cast<std::size_t>(i)] *= kernel.weight(grid.point(i));
            }
            break;
        }
        case KernelSpec::Type::riemann_liouville: {
            detail::check_rl_integrable(kernel.hurst, alpha.alpha);
            const double e = kernel.hurst - inv_alpha;
            out.values.assign(static_cast<std::size_t>(G), 0.0);
            for (std::size_t j = 0; j < J; ++j) {
                const double cj = std::pow(stream.gammas[j], -inv_alpha) * rng.normal();
                const double v = stream.site(j, 0);
                for (int i = 0; i < G; ++i) {
                    const double t = grid.point(i);
                    if (v < t) out.values[static_cast<std::size_t>(i)] += cj * std::pow(t - v, e);
                }
            }
            for (auto& x : out.values) x *= pref;
            break;
        }
        case KernelSpec::Type::sheet: {
            const std::size_t n = grid.total();
            std::vector<double> bucket(n, 0.0);
            for (std::size_t j = 0; j < J; ++j) {
                const double cj = std::pow(stream.gammas[j], -inv_alpha) * rng.normal();
                std::size_t idx = 0;
                for (int a = 0; a < kernel.dim; ++a) {
                    int ia = static_cast<int>(std::ceil(stream.site(j, a) * G)) - 1;
                    ia = std::clamp(ia, 0, G - 1);
                    idx = idx * static_cast<std::size_t>(G) + static_cast<std::size_t>(ia);
                }
                bucket[idx] += cj;
            }
            detail::lattice_prefix_sums(bucket, G, kernel.dim);
            out.values.resize(n);
            for (std::size_t c = 0; c < n; ++c) out.values[c] = pref * bucket[c];
            break;
        }
    }
    return out;
}

// Decreasing positive coefficient sequences.
struct ThetaSeq {
    enum class Kind { power_log, explicit_list };

    Kind kind = Kind::power_log;
    double gamma = 1.0;
    double beta = 0.0;
    std::vector<double> values;

    static ThetaSeq power_log(double gamma, double beta) {
        if (!(gamma > 0.0)) throw std::invalid_argument("ThetaSeq: gamma must be positive");
        ThetaSeq t;
        t.gamma = gamma;
        t.beta = beta;
        return t;
    }
    static ThetaSeq from_values(std::vector<double> v) {
        ThetaSeq t;
        t.kind = Kind::explicit_list;
        t.values = std::move(v);
        return t;
    }

    // 1-based; power_log family: theta_n = 2^{-n/gamma} n^{-beta/gamma}
    double at(std::size_t n) const {
        if (kind == Kind::explicit_list)
            return n <= values.size() ? values[n - 1] : 0.0;
        const double nn = static_cast<double>(n);
        return std::pow(2.0, -nn / gamma) * std::pow(nn, -beta / gamma);
    }
};

struct SumOfMaximaSample {
    double value = 0.0;
    // typical-scale bound on the neglected levels: sum_{n > n_max} theta_n
    // times the median scale of max over 2^n i.i.d. |SaS|; +inf when the
    // series does not certifiably converge.
    double tail_certificate = 0.0;
};

inline double level_max_median_scale(std::size_t m, StableIndex alpha) {
    if (alpha.is_gaussian())
        return 2.0 * std::sqrt(std::log(static_cast<double>(m) + 1.0));
    const double c2 = 2.0 * stable_tail_constant(alpha);
    return std::pow(c2 * static_cast<double>(m) / std::log(2.0), 1.0 / alpha.alpha);
}

inline double sum_of_maxima_tail_certificate(const ThetaSeq& theta, int n_max, StableIndex alpha) {
    double cert = 0.0;
    double prev = -1.0;
    for (int n = n_max + 1; n <= n_max + 600; ++n) {
        const double term = theta.at(static_cast<std::size_t>(n)) *
                            level_max_median_scale(std::size_t{1} << std::min(n, 62), alpha);
        cert += term;
        if (term < 1e-14 * cert) return cert;
        if (prev >= 0.0 && term >= prev) return std::numeric_limits<double>::infinity();
        prev = term;
    }
    return std::numeric_limits<double>::infinity();
}

// sum_{n<=n_max} theta_n max_{1<=l<=2^n} |xi_{n,l}| with i.i.d. standard SaS xi.
inline SumOfMaximaSample sum_of_maxima_sample(const ThetaSeq& theta, int n_max,
                                              StableIndex alpha, Rng& rng,
                                              int level_cap = 26) {
    if (n_max < 1) throw std::invalid_argument("sum_of_maxima_sample: n_max must be >= 1");
    if (n_max > level_cap)
        throw BudgetError("sum_of_maxima_sample: 2^levels exceeds the configured memory cap");
    SumOfMaximaSample out;
    for (int n = 1; n <= n_max; ++n) {
        const double th = theta.at(static_cast<std::size_t>(n));
        double mx = 0.0;
        const std::size_t m = std::size_t{1} << n;
        for (std::size_t l = 0; l < m; ++l)
            mx = std::max(mx, std::abs(sample_sas(alpha, rng)));
        out.value += th * mx;
    }
    out.tail_certificate = sum_of_maxima_tail_certificate(theta, n_max, alpha);
    return out;
}

// The same array laid out as a path (blocks of size 2^n, n = 1..n_max),
// for norm-based cross-checks.
inline PathSample sample_som_array(const ThetaSeq& theta, int n_max, StableIndex alpha,
                                   Rng& rng, int level_cap = 26) {
    if (n_max < 1) throw std::invalid_argument("sample_som_array: n_max must be >= 1");
    if (n_max > level_cap)
        throw BudgetError("sample_som_array: 2^levels exceeds the configured memory cap");
    PathSample out;
    out.grid = UniformGrid{1, 1};
    out.values.reserve((std::size_t{1} << (n_max + 1)) - 2);
    for (int n = 1; n <= n_max; ++n) {
        const double th = theta.at(static_cast<std::size_t>(n));
        const std::size_t m = std::size_t{1} << n;
        for (std::size_t l = 0; l < m; ++l)
            out.values.push_back(th * sample_sas(alpha, rng));
    }
    return out;
}

} // namespace sdlab
