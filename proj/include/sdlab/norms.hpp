#pragma once

// Norm evaluation on sampled paths: L_q by rectangle-rule quadrature on the
// grid, sup, and the blocked l_1(l_inf^{2^n}) norm.

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "sdlab/processes.hpp"

namespace sdlab {

struct NormSpec {
    enum class Kind { lq, sup, block_l1_linf_pow2 };

    Kind kind = Kind::lq;
    double q = 2.0;
    int levels = 0; // block norm: blocks of width 2^n, n = 1..levels

    static NormSpec Lq(double q) {
        if (!(q >= 1.0) || !std::isfinite(q))
            throw std::invalid_argument("NormSpec: Lq requires 1 <= q < inf");
        NormSpec s;
        s.kind = Kind::lq;
        s.q = q;
        return s;
    }
    static NormSpec Sup() {
        NormSpec s;
        s.kind = Kind::sup;
        return s;
    }
    static NormSpec BlockL1LinfPow2(int levels) {
        if (levels < 1) throw std::invalid_argument("NormSpec: block norm needs levels >= 1");
        NormSpec s;
        s.kind = Kind::block_l1_linf_pow2;
        s.levels = levels;
        return s;
    }
};

inline double norm(const PathSample& path, const NormSpec& spec) {
    switch (spec.kind) {
        case NormSpec::Kind::sup: {
            double mx = 0.0;
            for (double v : path.values) mx = std::max(mx, std::abs(v));
            return mx;
        }
        case NormSpec::Kind::lq: {
            const double w = 1.0 / static_cast<double>(path.values.size());
            double acc = 0.0;
            if (spec.q == 2.0) {
                for (double v : path.values) acc += v * v;
            } else {
                for (double v : path.values) acc += std::pow(std::abs(v), spec.q);
            }
            return std::pow(acc * w, 1.0 / spec.q);
        }
        case NormSpec::Kind::block_l1_linf_pow2: {
            const std::size_t expect = (std::size_t{1} << (spec.levels + 1)) - 2;
            if (path.values.size() != expect)
                throw std::invalid_argument("norm: path length does not match block structure");
            double acc = 0.0;
            std::size_t pos = 0;
            for (int n = 1; n <= spec.levels; ++n) {
                double mx = 0.0;
                const std::size_t m = std::size_t{1} << n;
                for (std::size_t l = 0; l < m; ++l)
                    mx = std::max(mx, std::abs(path.values[pos++]));
                acc += mx;
            }
            return acc;
        }
    }
    return 0.0;
}

} // namespace sdlab
