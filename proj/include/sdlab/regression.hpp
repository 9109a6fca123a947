#pragma once

// Small weighted least-squares engine (up to 3 regressors) shared by the
// rate fits. Normal equations with a hand-rolled symmetric solve; problem
// sizes here never justify a matrix library.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sdlab {

struct WlsResult {
    std::vector<double> beta;
    std::vector<double> stderrs;
    double residual_rms = 0.0;
};

inline WlsResult wls_fit(const std::vector<std::vector<double>>& cols,
                         const std::vector<double>& y,
                         const std::vector<double>& w) {
    const std::size_t p = cols.size();
    const std::size_t n = y.size();
    if (p == 0 || p > 3) throw std::invalid_argument("wls_fit: 1..3 regressors supported");
    for (const auto& c : cols)
        if (c.size() != n) throw std::invalid_argument("wls_fit: column length mismatch");
    if (w.size() != n) throw std::invalid_argument("wls_fit: weight length mismatch");
    if (n < p) throw std::invalid_argument("wls_fit: underdetermined");

    std::array<std::array<double, 3>, 3> xtx{};
    std::array<double, 3> xty{};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < p; ++a) {
            xty[a] += w[i] * cols[a][i] * y[i];
            for (std::size_t b = a; b < p; ++b)
                xtx[a][b] += w[i] * cols[a][i] * cols[b][i];
        }
    }
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b < a; ++b) xtx[a][b] = xtx[b][a];

    // invert the p x p block by Gauss-Jordan
    std::array<std::array<double, 6>, 3> aug{};
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < p; ++b) aug[a][b] = xtx[a][b];
        aug[a][p + a] = 1.0;
    }
    for (std::size_t c = 0; c < p; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < p; ++r)
            if (std::abs(aug[r][c]) > std::abs(aug[piv][c])) piv = r;
        if (std::abs(aug[piv][c]) < 1e-300)
            throw std::invalid_argument("wls_fit: singular design");
        std::swap(aug[c], aug[piv]);
        const double d = aug[c][c];
        for (std::size_t b = 0; b < 2 * p; ++b) aug[c][b] /= d;
        for (std::size_t r = 0; r < p; ++r) {
            if (r == c) continue;
            const double f = aug[r][c];
            for (std::size_t b = 0; b < 2 * p; ++b) aug[r][b] -= f * aug[c][b];
        }
    }

    WlsResult out;
    out.beta.assign(p, 0.0);
    out.stderrs.assign(p, 0.0);
    for (std::size_t a = 0; a < p; ++a) {
        double v = 0.0;
        for (std::size_t b = 0; b < p; ++b) v += aug[a][p + b] * xty[b];
        out.beta[a] = v;
    }
    double ss = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (std::size_t a = 0; a < p; ++a) fit += out.beta[a] * cols[a][i];
        const double r = y[i] - fit;
        ss += w[i] * r * r;
        wsum += w[i];
    }
    out.residual_rms = wsum > 0.0 ? std::sqrt(ss / wsum) : 0.0;
    for (std::size_t a = 0; a < p; ++a)
        out.stderrs[a] = std::sqrt(std::max(0.0, aug[a][p + a]));
    return out;
}

} // namespace sdlab
