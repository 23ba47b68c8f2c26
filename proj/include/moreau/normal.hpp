#pragma once

// Logarithms of standard normal tail probabilities, accurate far into the tails.

#include <cmath>
#include <limits>

namespace moreau::normal {

inline constexpr double pi = 3.141592653589793238462643383279502884;

/// log P(N > z).
inline double log_sf(double z) {
    if (z == std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::infinity();
    if (z == -std::numeric_limits<double>::infinity()) return 0.0;
    if (z < -5.0) return std::log1p(-0.5 * std::erfc(-z / std::sqrt(2.0)));
    if (z < 30.0) return std::log(0.5 * std::erfc(z / std::sqrt(2.0)));
    // Mills ratio series: P(N > z) ~ phi(z)/z * (1 - 1/z^2 + 3/z^4 - 15/z^6 + 105/z^8)
    const double w = 1.0 / (z * z);
    const double series = 1.0 - w * (1.0 - 3.0 * w * (1.0 - 5.0 * w * (1.0 - 7.0 * w)));
    return -0.5 * z * z - std::log(z) - 0.5 * std::log(2.0 * pi) + std::log(series);
}

/// log P(N <= z).
inline double log_cdf(double z) { return log_sf(-z); }

/// log P(a <= N <= b), -inf when a >= b.
inline double log_prob_interval(double a, double b) {
    if (!(a < b)) return -std::numeric_limits<double>::infinity();
    if (a >= 0.0) {
        const double la = log_sf(a), lb = log_sf(b);
        return la + std::log1p(-std::exp(lb - la));
    }
    if (b <= 0.0) {
        const double lb = log_sf(-b), la = log_sf(-a);
        return lb + std::log1p(-std::exp(la - lb));
    }
    return std::log1p(-(std::exp(log_sf(b)) + std::exp(log_sf(-a))));
}

}  // namespace moreau::normal
