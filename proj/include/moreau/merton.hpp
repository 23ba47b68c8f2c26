#pragma once

// Merton investment model: wealth dW = (r + (α-r)ξ) W dt + σ ξ W dB with a
// fraction ξ in the risky asset. Closed forms for the risk-sensitive value g
// and its conjugate g*, exact and Monte Carlo simulation, the forms built from
// log(W_T)/T, and the tail-rate experiment for P[log(W_T)/T >= c].

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "moreau/parallel.hpp"
#include "moreau/quasilinear.hpp"

namespace moreau::merton {

struct Params {
    double r = 0.05;
    double alpha = 0.10;
    double sigma = 0.20;
    double W0 = 1.0;

    void validate() const {
        if (!(r > 0.0 && alpha > r && sigma > 0.0 && W0 > 0.0) || !std::isfinite(alpha) || !std::isfinite(sigma) ||
            !std::isfinite(W0))
            throw error(errc::invalid_argument, "merton: need alpha > r > 0, sigma > 0, W0 > 0");
    }
};

/// Growth rate of log-wealth under a constant fraction ξ.
inline double mean_rate(double xi, const Params& p) {
    return p.r + (p.alpha - p.r) * xi - 0.5 * p.sigma * p.sigma * xi * xi;
}

inline double z0(const Params& p) {
    const double d = p.alpha - p.r;
    return p.r + d * d / (2.0 * p.sigma * p.sigma);
}

inline ExtReal g_closed(double x, const Params& p) {
    if (x < 0.0 || x >= 1.0) return ExtReal::pos_inf();
    const double d = p.alpha - p.r;
    return ExtReal(x * (p.r + d * d / (2.0 * p.sigma * p.sigma * (1.0 - x))));
}

inline double xi_star(double x, const Params& p) { return (p.alpha - p.r) / (p.sigma * p.sigma * (1.0 - x)); }

inline double g_star(double y, const Params& p) {
    if (y < z0(p)) return 0.0;
    const double t = std::sqrt(y - p.r) - (p.alpha - p.r) / (std::sqrt(2.0) * p.sigma);
    return t * t;
}

/// Grid maximum over ξ of x (r + (α-r)ξ + (x-1)σ²ξ²/2).
inline double brute_force_g(double x, const Params& p, const std::vector<double>& xi_grid) {
    double best = -std::numeric_limits<double>::infinity();
    for (double xi : xi_grid)
        best = std::max(best, x * (p.r + (p.alpha - p.r) * xi + (x - 1.0) * p.sigma * p.sigma * xi * xi / 2.0));
    return best;
}

/// lo, lo+step, ..., up to hi (inclusive within half a step).
inline std::vector<double> xi_range(double lo, double hi, double step) {
    if (!(step > 0.0) || !(lo <= hi)) throw error(errc::invalid_argument, "xi_range: need lo <= hi and step > 0");
    std::vector<double> v;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5));
    for (std::size_t i = 0; i <= n; ++i) v.push_back(lo + static_cast<double>(i) * step);
    return v;
}

// --------------------------------------------------------------------------
// Controls and simulation

struct Constant {
    double xi = 0.0;
};

/// ξ tabulated on a (t, log-wealth) grid; looked up at the nearest node.
struct Feedback {
    GridFn table;  // 2-D grid: axis 0 is time, axis 1 is log-wealth
    double time_step = 0.01;
};

using ControlSpec = std::variant<Constant, Feedback>;

struct WealthSamples {
    double T = 1.0;
    std::vector<double> values;  // log(W_T)/T
    ControlSpec control;
    std::uint64_t seed = 0;
};

inline constexpr std::size_t chunk_paths = 4096;

inline std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t chunk) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
    return std::mt19937_64(seq);
}

/// Paths are generated in chunks with their own streams, so results do not
/// depend on the thread count. `stream` separates independent experiments.
inline WealthSamples simulate(const Params& p, const ControlSpec& control, double T, std::size_t n_paths,
                              std::uint64_t seed, unsigned threads = 1, std::uint64_t stream = 0) {
    p.validate();
    if (!(T > 0.0) || !std::isfinite(T)) throw error(errc::invalid_argument, "simulate: T must be positive");
    if (n_paths < 1) throw error(errc::invalid_argument, "simulate: n_paths >= 1");
    if (const auto* fb = std::get_if<Feedback>(&control)) {
        const Grid& g = fb->table.grid;
        if (g.dim() != 2) throw error(errc::invalid_argument, "feedback table needs a 2-D (t, log-wealth) grid");
        if (g.axis(0).lo > 0.0 || g.axis(0).hi < T) throw error(errc::invalid_argument, "feedback table must cover [0, T]");
        if (!(fb->time_step > 0.0)) throw error(errc::invalid_argument, "feedback time_step must be positive");
        for (const auto& v : fb->table.values)
            if (!v.is_finite()) throw error(errc::invalid_argument, "feedback table entries must be finite");
    }

    WealthSamples out{T, std::vector<double>(n_paths), control, seed};
    const double logw0 = std::log(p.W0);
    const std::size_t chunks = (n_paths + chunk_paths - 1) / chunk_paths;

    parallel_for(chunks, threads, [&](std::size_t c) {
        auto rng = chunk_rng(seed, stream, c);
        std::normal_distribution<double> nd(0.0, 1.0);
        const std::size_t a = c * chunk_paths, b = std::min(n_paths, a + chunk_paths);
        if (const auto* cs = std::get_if<Constant>(&control)) {
            const double m = mean_rate(cs->xi, p);
            const double sd = p.sigma * cs->xi / std::sqrt(T);
            for (std::size_t i = a; i < b; ++i) out.values[i] = logw0 / T + m + sd * nd(rng);
        } else {
            const auto& fb = std::get<Feedback>(control);
            const Grid& g = fb.table.grid;
            const auto steps = static_cast<std::size_t>(std::ceil(T / fb.time_step - 1e-9));
            const double dt = T / static_cast<double>(steps);
            auto lookup = [&](double t, double lw) {
                std::size_t node[2];
                const double c0[2] = {t, lw};
                for (std::size_t k = 0; k < 2; ++k) {
                    const Axis& ax = g.axis(k);
                    if (ax.n == 1 || c0[k] <= ax.lo) node[k] = 0;
                    else if (c0[k] >= ax.hi) node[k] = ax.n - 1;
                    else node[k] = static_cast<std::size_t>(std::llround((c0[k] - ax.lo) / ax.step()));
                }
                return fb.table[g.flat(node[0], node[1])].value();
            };
            for (std::size_t i = a; i < b; ++i) {
                double lw = logw0;
                for (std::size_t s = 0; s < steps; ++s) {
                    const double xi = lookup(static_cast<double>(s) * dt, lw);
                    lw += mean_rate(xi, p) * dt + p.sigma * xi * std::sqrt(dt) * nd(rng);
                }
                out.values[i] = lw / T;
            }
        }
    });
    return out;
}

// --------------------------------------------------------------------------
// Risk-sensitive values (1/T) log E[W_T^x]; x = 1 - γ for risk aversion γ.

inline double risk_sensitive_value(double x, const WealthSamples& s) {
    if (s.values.empty()) throw error(errc::invalid_argument, "risk_sensitive_value: no samples");
    std::vector<double> t(s.values.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = x * s.T * s.values[i];
    return (detail::log_sum_exp(t) - std::log(static_cast<double>(t.size()))) / s.T;
}

inline double risk_sensitive_exact(double x, double xi, const Params& p, double T) {
    return x * std::log(p.W0) / T + x * (p.r + (p.alpha - p.r) * xi + (x - 1.0) * p.sigma * p.sigma * xi * xi / 2.0);
}

struct ValueWithSE {
    double value = 0.0;
    double se = 0.0;
};

inline ValueWithSE risk_sensitive_value_se(double x, const WealthSamples& s, std::size_t n_boot = 200,
                                           std::uint64_t seed = 0) {
    ValueWithSE out{risk_sensitive_value(x, s), 0.0};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, s.values.size() - 1);
    WealthSamples b{s.T, std::vector<double>(s.values.size()), s.control, s.seed};
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t k = 0; k < n_boot; ++k) {
        for (auto& v : b.values) v = s.values[pick(rng)];
        const double r = risk_sensitive_value(x, b);
        sum += r;
        sum2 += r * r;
    }
    const double nb = static_cast<double>(n_boot);
    out.se = n_boot > 1 ? std::sqrt(std::max(0.0, (sum2 - sum * sum / nb) / (nb - 1.0))) : 0.0;
    return out;
}

// --------------------------------------------------------------------------
// Forms on y = log(W_T)/T

/// Law of log(W_T)/T under a constant ξ (exact Gaussian), ε = 1/T.
inline QuasiLinearForm gaussian_form(const Params& p, double xi, double T) {
    return QuasiLinearForm::gaussian(1.0 / T, std::log(p.W0) / T + mean_rate(xi, p), p.sigma * p.sigma * xi * xi / T);
}

/// Sup over every constant ξ in R; linear test functions are evaluated in closed form.
inline QuasiLinearForm quadratic_family(const Params& p, double T, std::vector<double> xi_grid) {
    return QuasiLinearForm::gaussian_quadratic(1.0 / T, {p.r + std::log(p.W0) / T, p.alpha - p.r, -0.5 * p.sigma * p.sigma},
                                               p.sigma * p.sigma / T, std::move(xi_grid));
}

/// Sup over the listed constant controls.
inline QuasiLinearForm control_family(const Params& p, double T, const std::vector<double>& xi_list) {
    std::vector<QuasiLinearForm> ms;
    ms.reserve(xi_list.size());
    for (double xi : xi_list) ms.push_back(gaussian_form(p, xi, T));
    return QuasiLinearForm::sup_family(std::move(ms));
}

using moreau::truncate_form;

/// Empirical form of simulated log(W_T)/T.
inline QuasiLinearForm empirical_form(const WealthSamples& s) { return QuasiLinearForm::empirical(1.0 / s.T, s.values); }

// --------------------------------------------------------------------------
// Tail rates

/// (1/T) log P[log(W_T)/T >= c] under constant ξ.
inline double exact_tail(double c, double xi, const Params& p, double T) {
    const double mean = std::log(p.W0) / T + mean_rate(xi, p);
    if (xi == 0.0) return mean >= c ? 0.0 : -std::numeric_limits<double>::infinity();
    const double sd = p.sigma * std::abs(xi) / std::sqrt(T);
    return normal::log_sf((c - mean) / sd) / T;
}

/// min over ξ != 0 of (c - m(ξ))² / (2σ²ξ²), the Gaussian rate of {y >= c}
/// (0 where m(ξ) >= c).
inline double control_oracle(double c, const Params& p, const std::vector<double>& xi_grid) {
    double best = std::numeric_limits<double>::infinity();
    for (double xi : xi_grid) {
        if (xi == 0.0) {
            if (p.r >= c) best = 0.0;
            continue;
        }
        const double d = c - mean_rate(xi, p);
        best = std::min(best, d <= 0.0 ? 0.0 : d * d / (2.0 * p.sigma * p.sigma * xi * xi));
    }
    return best;
}

struct TailCell {
    double T = 0.0;
    double xi = 0.0;
    double exact = 0.0;
    double mc = std::numeric_limits<double>::quiet_NaN();  // NaN when not simulated
    double mc_se = std::numeric_limits<double>::quiet_NaN();
    std::size_t hits = 0;
    bool mc_inconclusive = false;
};

struct TailReport {
    double c = 0.0;
    Params params;
    std::vector<double> T_list;
    std::vector<double> xi_grid;
    std::vector<TailCell> cells;         // T-major, then ξ
    std::vector<double> sup_over_xi;     // per T
    std::vector<double> argsup_xi;       // per T
    double target = 0.0;                 // -g*(c)
    double oracle_rate = 0.0;            // control oracle, should equal g*(c)
    bool degenerate = false;             // c <= r
    bool monotone_toward_target = false;
    double final_relative_error = 0.0;
    std::string note;
};

struct TailOptions {
    std::size_t n_paths = 0;   // 0 skips Monte Carlo
    std::uint64_t seed = 0;
    unsigned threads = 1;
    /// Monte Carlo only for T <= mc_T_max
    double mc_T_max = std::numeric_limits<double>::infinity();
};

inline TailReport tail_rate_experiment(double c, const Params& p, const std::vector<double>& T_list,
                                       const std::vector<double>& xi_grid, const TailOptions& opt = {}) {
    p.validate();
    if (T_list.empty() || xi_grid.empty()) throw error(errc::invalid_argument, "tail_rate_experiment: empty T or ξ list");
    TailReport rep;
    rep.c = c;
    rep.params = p;
    rep.T_list = T_list;
    rep.xi_grid = xi_grid;
    rep.target = -g_star(c, p);
    rep.oracle_rate = control_oracle(c, p, xi_grid);
    rep.degenerate = c <= p.r;
    if (rep.degenerate) rep.note = "c <= r: the riskless strategy already reaches c, the rate is 0";

    for (std::size_t it = 0; it < T_list.size(); ++it) {
        const double T = T_list[it];
        double best = -std::numeric_limits<double>::infinity(), arg = 0.0;
        for (std::size_t ix = 0; ix < xi_grid.size(); ++ix) {
            TailCell cell;
            cell.T = T;
            cell.xi = xi_grid[ix];
            cell.exact = exact_tail(c, cell.xi, p, T);
            if (cell.exact > best) {
                best = cell.exact;
                arg = cell.xi;
            }
            if (opt.n_paths > 0 && T <= opt.mc_T_max) {
                const auto s = simulate(p, Constant{cell.xi}, T, opt.n_paths, opt.seed, opt.threads,
                                        static_cast<std::uint64_t>(it) * 1000003ULL + ix);
                for (double v : s.values)
                    if (v >= c) ++cell.hits;
                const double n = static_cast<double>(opt.n_paths);
                if (cell.hits == 0) {
                    cell.mc_inconclusive = true;
                } else {
                    const double ph = static_cast<double>(cell.hits) / n;
                    cell.mc = std::log(ph) / T;
                    cell.mc_se = std::sqrt(ph * (1.0 - ph) / n) / (ph * T);
                }
            }
            rep.cells.push_back(cell);
        }
        rep.sup_over_xi.push_back(best);
        rep.argsup_xi.push_back(arg);
    }

    rep.monotone_toward_target = true;
    for (std::size_t i = 1; i < rep.sup_over_xi.size(); ++i) {
        const double prev = std::abs(rep.sup_over_xi[i - 1] - rep.target);
        const double cur = std::abs(rep.sup_over_xi[i] - rep.target);
        if (!(cur < prev)) rep.monotone_toward_target = false;
    }
    const double last = rep.sup_over_xi.back();
    rep.final_relative_error =
        rep.target != 0.0 ? std::abs(last - rep.target) / std::abs(rep.target) : std::abs(last - rep.target);
    return rep;
}

/// CSV with columns T, xi, exact_value, mc_value, mc_se, sup_over_xi, target_minus_gstar.
inline std::string tail_csv(const TailReport& rep) {
    std::string s = "T,xi,exact_value,mc_value,mc_se,sup_over_xi,target_minus_gstar\n";
    auto num = [](double v) -> std::string {
        if (std::isnan(v)) return "";
        if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    };
    const std::size_t nxi = rep.xi_grid.size();
    for (std::size_t k = 0; k < rep.cells.size(); ++k) {
        const TailCell& c = rep.cells[k];
        s += num(c.T) + "," + num(c.xi) + "," + num(c.exact) + "," + num(c.mc) + "," + num(c.mc_se) + "," +
             num(rep.sup_over_xi[k / nxi]) + "," + num(rep.target) + "\n";
    }
    return s;
}

}  // namespace moreau::merton
