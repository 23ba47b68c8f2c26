#pragma once

// Limit estimates for finite prefixes of sequences indexed by n.
//
// The deviations v_n - v_last are fitted by least squares on {1, 1/n, log(n)/n}
// (on {1, 1/n} with three points). The limit is v_last + intercept, and the
// largest fit residual turns it into a liminf/limsup band. A sequence that is
// constant is returned exactly.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "moreau/error.hpp"
#include "moreau/extreal.hpp"

namespace moreau {

struct Trend {
    ExtReal limit = ExtReal::neg_inf();
    ExtReal liminf = ExtReal::neg_inf();
    ExtReal limsup = ExtReal::neg_inf();
    double residual = 0.0;
    bool conclusive = false;  // false with fewer than 3 indices
};

namespace detail {

// Solves the k x k system a x = b in place (partial pivoting). Returns false if singular.
template <std::size_t K>
bool solve(std::array<std::array<double, K>, K> a, std::array<double, K>& b) {
    for (std::size_t c = 0; c < K; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < K; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        if (a[p][c] == 0.0) return false;
        std::swap(a[p], a[c]);
        std::swap(b[p], b[c]);
        for (std::size_t r = c + 1; r < K; ++r) {
            const double f = a[r][c] / a[c][c];
            for (std::size_t q = c; q < K; ++q) a[r][q] -= f * a[c][q];
            b[r] -= f * b[c];
        }
    }
    for (std::size_t c = K; c-- > 0;) {
        double s = b[c];
        for (std::size_t q = c + 1; q < K; ++q) s -= a[c][q] * b[q];
        b[c] = s / a[c][c];
    }
    return true;
}

template <std::size_t K>
bool fit(const std::vector<double>& n, const std::vector<double>& d, std::array<double, K>& coef, double& resid) {
    auto basis = [](double m) {
        std::array<double, 3> phi{1.0, 1.0 / m, std::log(m) / m};
        return phi;
    };
    // column scaling keeps the normal equations well conditioned
    std::array<double, K> scale{};
    for (double m : n) {
        const auto phi = basis(m);
        for (std::size_t k = 0; k < K; ++k) scale[k] = std::max(scale[k], std::abs(phi[k]));
    }
    for (auto& s : scale)
        if (s == 0.0) s = 1.0;
    std::array<std::array<double, K>, K> ata{};
    std::array<double, K> atb{};
    for (std::size_t i = 0; i < n.size(); ++i) {
        const auto phi = basis(n[i]);
        for (std::size_t a = 0; a < K; ++a) {
            atb[a] += phi[a] / scale[a] * d[i];
            for (std::size_t b = 0; b < K; ++b) ata[a][b] += phi[a] / scale[a] * phi[b] / scale[b];
        }
    }
    if (!solve<K>(ata, atb)) return false;
    for (std::size_t k = 0; k < K; ++k) coef[k] = atb[k] / scale[k];
    resid = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        const auto phi = basis(n[i]);
        double y = 0.0;
        for (std::size_t k = 0; k < K; ++k) y += coef[k] * phi[k];
        resid = std::max(resid, std::abs(y - d[i]));
    }
    return true;
}

}  // namespace detail

inline Trend extrapolate(const std::vector<double>& n, const std::vector<ExtReal>& v) {
    if (n.size() != v.size() || n.empty()) throw error(errc::invalid_argument, "extrapolate: need matching, nonempty n and values");
    for (double m : n)
        if (!(m > 0.0)) throw error(errc::invalid_argument, "extrapolate: indices must be positive");

    Trend t;
    t.conclusive = n.size() >= 3;
    const ExtReal last = v.back();
    ExtReal lo = v.front(), hi = v.front();
    bool all_finite = true;
    for (const auto& x : v) {
        lo = min(lo, x);
        hi = max(hi, x);
        all_finite = all_finite && x.is_finite();
    }
    if (!all_finite) {
        t.limit = last;
        if (lo == hi) {
            t.liminf = t.limsup = last;
        } else {
            t.liminf = lo;
            t.limsup = hi;
            t.residual = std::numeric_limits<double>::infinity();
        }
        return t;
    }

    std::vector<double> d(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) d[i] = v[i].value() - last.value();

    double shift = 0.0, resid = 0.0;
    bool ok = false;
    if (n.size() >= 4) {
        std::array<double, 3> c{};
        ok = detail::fit<3>(n, d, c, resid);
        if (ok) shift = c[0];
    }
    if (!ok && n.size() >= 3) {
        std::array<double, 2> c{};
        ok = detail::fit<2>(n, d, c, resid);
        if (ok) shift = c[0];
    }
    if (!ok) {
        // too short to fit: the spread of the values is the band
        for (double x : d) resid = std::max(resid, std::abs(x));
        shift = 0.0;
    }
    t.residual = resid;
    t.limit = ExtReal(last.value() + shift);
    t.liminf = ExtReal(t.limit.value() - resid);
    t.limsup = ExtReal(t.limit.value() + resid);
    return t;
}

}  // namespace moreau
