#pragma once

// Primitive stable random sources: standard SaS variates (characteristic
// function exp(-|lambda|^alpha)), unit-Poisson arrival times, and the
// series normalization constant c_alpha.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "sdlab/rng.hpp"

namespace sdlab {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

struct StableIndex {
    double alpha;

    explicit StableIndex(double a) : alpha(a) {
        if (!(a > 0.0) || a > 2.0)
            throw std::invalid_argument("StableIndex: alpha must be in (0,2]");
    }

    // alpha = 2 is the Gaussian case; the LePage machinery is forbidden there.
    bool is_gaussian() const { return alpha == 2.0; }
};

// sin-integral int_0^inf x^-a sin x dx via the reflection-free closed form
// pi / (2 Gamma(a) sin(pi a / 2)), smooth on (0,2) including a = 1.
inline double sine_integral_power(double alpha) {
    return kPi / (2.0 * std::tgamma(alpha) * std::sin(kPi * alpha / 2.0));
}

// E|xi|^alpha for standard normal xi.
inline double normal_abs_moment(double alpha) {
    return std::pow(2.0, alpha / 2.0) * std::tgamma((alpha + 1.0) / 2.0) / std::sqrt(kPi);
}

// c_alpha = sqrt(2) I(alpha)^{-1/alpha} (E|xi|^alpha)^{-1/alpha}, 0 < alpha < 2.
inline double c_alpha(StableIndex idx) {
    if (idx.alpha >= 2.0)
        throw std::invalid_argument("c_alpha: requires alpha < 2");
    const double a = idx.alpha;
    return std::sqrt(2.0) *
           std::pow(sine_integral_power(a) * normal_abs_moment(a), -1.0 / a);
}

// The constant that actually normalizes the conditionally-Gaussian series
// (equal to c_alpha / 2; see lepage.hpp for where it enters).
inline double mixture_constant(StableIndex idx) { return 0.5 * c_alpha(idx); }

// One standard SaS variate by the trigonometric (symmetric Chambers-Mallows-
// Stuck) transform of a uniform angle and a unit exponential. Consumes
// exactly two generator words for every alpha.
inline double sample_sas(StableIndex idx, Rng& rng) {
    const double a = idx.alpha;
    const double u = kPi * (rng.uniform_open01() - 0.5); // (-pi/2, pi/2)
    const double w = -std::log(rng.uniform_open01());
    if (a == 1.0) return std::tan(u);
    if (a == 2.0) return 2.0 * std::sin(u) * std::sqrt(w);
    const double t1 = std::sin(a * u) * std::pow(std::cos(u), -1.0 / a);
    const double t2 = std::pow(std::cos((1.0 - a) * u) / w, (1.0 - a) / a);
    return t1 * t2;
}

// Gamma_1 < Gamma_2 < ... < Gamma_J: partial sums of i.i.d. unit exponentials.
inline std::vector<double> gamma_arrivals(std::size_t J, Rng& rng) {
    if (J == 0)
        throw std::invalid_argument("gamma_arrivals: J must be >= 1");
    std::vector<double> out(J);
    double acc = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
        acc += rng.exponential();
        out[j] = acc;
    }
    return out;
}

// One-sided tail constant: lim t^alpha P(X > t) = Gamma(alpha) sin(pi alpha/2) / pi.
inline double stable_tail_constant(StableIndex idx) {
    if (idx.alpha >= 2.0)
        throw std::invalid_argument("stable_tail_constant: requires alpha < 2");
    return std::tgamma(idx.alpha) * std::sin(kPi * idx.alpha / 2.0) / kPi;
}

} // namespace sdlab
