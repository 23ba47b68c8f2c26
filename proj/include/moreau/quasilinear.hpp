#pragma once

// Quasi-linear forms F on functions over Y: isotone, additively homogeneous,
// and F(φ ∨ ψ) <= ρ + F(φ) ∨ F(ψ).
//
//   MaxPlus       F(φ) = max_y φ(y) - f(y)                       ρ = 0
//   LogIntegral   F(φ) = ε log Σ_y w_y e^{φ(y)/ε}                 ρ <= ε log 2
//   Empirical     LogIntegral of an empirical measure (ε = 1/T)
//   Gaussian      LogIntegral of N(mean, var), optionally of max(S, a)
//   GaussianQuadratic
//                 sup over controls ξ of Gaussians with mean m0 + m1 ξ + m2 ξ²
//                 and variance v2 ξ²
//   SupFamily     pointwise max of members                       ρ <= max ρ_i
//
// Continuous variants see a grid function through its lower envelope: on
// [y_i, y_{i+1}] the value is min(φ_i, φ_{i+1}), the edge values extend to
// ±∞, and atoms sitting on a node take that node's value. For an indicator
// of a run of nodes this gives exactly the probability of the closed interval
// between the run's end nodes (a ray when the run reaches an edge).
//
// On a finite grid every function is both l.s.c. and u.s.c., so the lsc and
// maximal extensions of a form coincide with direct evaluation.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "moreau/kernel.hpp"
#include "moreau/normal.hpp"

namespace moreau {

namespace detail {

/// log Σ exp(t_i) with max shift; -inf terms are skipped.
inline double log_sum_exp(const std::vector<double>& t) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : t) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : t)
        if (x != -std::numeric_limits<double>::infinity()) s += std::exp(x - m);
    return m + std::log(s);
}

inline double log_sum_exp2(double a, double b) {
    if (a < b) std::swap(a, b);
    if (!std::isfinite(a)) return a;
    return a + std::log1p(std::exp(b - a));
}

}  // namespace detail

struct QuasiLinearForm;

namespace form {

struct MaxPlus {
    GridFn density;
};

struct LogIntegral {
    double epsilon = 1.0;
    Grid grid;
    std::vector<double> log_weights;  // -inf for zero mass
};

struct Empirical {
    double epsilon = 1.0;
    std::vector<double> samples;
    std::vector<double> log_weights;  // normalized to total mass 1
};

struct Gaussian {
    double epsilon = 1.0;
    double mean = 0.0;
    double variance = 1.0;
    std::optional<double> truncation;  // law of max(S, a)
};

struct GaussianQuadratic {
    double epsilon = 1.0;
    std::array<double, 3> mean_coef{};  // mean(ξ) = c0 + c1 ξ + c2 ξ²
    double var_coef = 0.0;              // variance(ξ) = v ξ²
    std::vector<double> xi_grid;        // controls used off the closed form
};

struct SupFamily {
    std::vector<QuasiLinearForm> members;
};

}  // namespace form

struct QuasiLinearForm {
    std::variant<form::MaxPlus, form::LogIntegral, form::Empirical, form::Gaussian, form::GaussianQuadratic,
                 form::SupFamily>
        v;

    static QuasiLinearForm max_plus(GridFn density) { return {form::MaxPlus{std::move(density)}}; }

    /// weights >= 0 per node, not all zero.
    static QuasiLinearForm log_integral(double eps, Grid grid, const std::vector<double>& weights) {
        check_eps(eps);
        if (weights.size() != grid.size()) throw error(errc::grid_mismatch, "log_integral: one weight per node");
        std::vector<double> lw(weights.size());
        bool any = false;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
                throw error(errc::invalid_argument, "log_integral: weights must be finite and nonnegative");
            lw[i] = std::log(weights[i]);
            any = any || weights[i] > 0.0;
        }
        if (!any) throw error(errc::invalid_argument, "log_integral: total mass must be positive");
        return {form::LogIntegral{eps, std::move(grid), std::move(lw)}};
    }

    static QuasiLinearForm empirical(double eps, std::vector<double> samples, const std::vector<double>& weights = {}) {
        check_eps(eps);
        if (samples.empty()) throw error(errc::invalid_argument, "empirical: need at least one sample");
        std::vector<double> w = weights.empty() ? std::vector<double>(samples.size(), 1.0) : weights;
        if (w.size() != samples.size()) throw error(errc::invalid_argument, "empirical: one weight per sample");
        double total = 0.0;
        for (double x : w) {
            if (!(x >= 0.0) || !std::isfinite(x)) throw error(errc::invalid_argument, "empirical: bad weight");
            total += x;
        }
        if (!(total > 0.0)) throw error(errc::invalid_argument, "empirical: total mass must be positive");
        for (double s : samples)
            if (!std::isfinite(s)) throw error(errc::invalid_argument, "empirical: samples must be finite");
        std::vector<double> lw(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) lw[i] = std::log(w[i] / total);
        return {form::Empirical{eps, std::move(samples), std::move(lw)}};
    }

    static QuasiLinearForm gaussian(double eps, double mean, double variance, std::optional<double> a = {}) {
        check_eps(eps);
        if (!(variance >= 0.0) || !std::isfinite(mean)) throw error(errc::invalid_argument, "gaussian: bad parameters");
        return {form::Gaussian{eps, mean, variance, a}};
    }

    static QuasiLinearForm gaussian_quadratic(double eps, std::array<double, 3> mean_coef, double var_coef,
                                              std::vector<double> xi_grid) {
        check_eps(eps);
        if (!(var_coef >= 0.0)) throw error(errc::invalid_argument, "gaussian_quadratic: negative variance");
        return {form::GaussianQuadratic{eps, mean_coef, var_coef, std::move(xi_grid)}};
    }

    static QuasiLinearForm sup_family(std::vector<QuasiLinearForm> members) {
        if (members.empty()) throw error(errc::invalid_argument, "sup_family: need at least one member");
        return {form::SupFamily{std::move(members)}};
    }

    /// Best known ρ bound for the variant.
    [[nodiscard]] double rho_bound() const {
        return std::visit(
            [](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, form::MaxPlus>) {
                    return 0.0;
                } else if constexpr (std::is_same_v<T, form::SupFamily>) {
                    double r = -std::numeric_limits<double>::infinity();
                    for (const auto& m : f.members) r = std::max(r, m.rho_bound());
                    return r;
                } else {
                    return f.epsilon * std::log(2.0);
                }
            },
            v);
    }

    /// The grid a grid-based variant lives on; nullptr for continuous variants.
    [[nodiscard]] const Grid* grid() const {
        if (auto* m = std::get_if<form::MaxPlus>(&v)) return &m->density.grid;
        if (auto* l = std::get_if<form::LogIntegral>(&v)) return &l->grid;
        if (auto* s = std::get_if<form::SupFamily>(&v))
            for (const auto& m : s->members)
                if (auto* g = m.grid()) return g;
        return nullptr;
    }

private:
    static void check_eps(double eps) {
        if (!(eps > 0.0) || !std::isfinite(eps)) throw error(errc::invalid_argument, "epsilon must be positive");
    }
};

// --------------------------------------------------------------------------

namespace detail {

// Lower-envelope evaluation of a 1-D grid function against N(m, s²) (or max(S, a)).
inline ExtReal gaussian_envelope(const form::Gaussian& gf, const GridFn& phi) {
    const Grid& gr = phi.grid;
    if (gr.dim() != 1) throw error(errc::invalid_argument, "continuous forms need a 1-D grid");
    const std::size_t n = gr.size();
    const double eps = gf.epsilon, m = gf.mean, s = std::sqrt(gf.variance);

    auto value_at_point = [&](double p) -> ExtReal {
        if (p <= gr.coord(0)) return phi[0];
        if (p >= gr.coord(n - 1)) return phi[n - 1];
        const double h = gr.axis(0).step();
        std::size_t i = static_cast<std::size_t>(std::floor((p - gr.coord(0)) / h));
        i = std::min(i, n - 2);
        while (i > 0 && gr.coord(i) > p) --i;
        while (i + 1 < n - 1 && gr.coord(i + 1) <= p) ++i;
        if (gr.coord(i) == p) return phi[i];
        if (gr.coord(i + 1) == p) return phi[i + 1];
        return min(phi[i], phi[i + 1]);
    };

    const double lo_cut = gf.truncation ? *gf.truncation : -std::numeric_limits<double>::infinity();
    if (s == 0.0) return value_at_point(std::max(m, lo_cut));

    std::vector<double> terms;
    bool pos_inf = false;
    auto add = [&](double logp, ExtReal val) {
        if (logp == -std::numeric_limits<double>::infinity() || val.is_neg_inf()) return;
        if (val.is_pos_inf()) {
            pos_inf = true;
            return;
        }
        terms.push_back(logp + val.value() / eps);
    };
    // mass of S in [lo, hi], clipped to the part above the truncation point
    auto piece = [&](double lo, double hi, ExtReal val) {
        lo = std::max(lo, lo_cut);
        if (!(lo < hi)) return;
        add(normal::log_prob_interval((lo - m) / s, (hi - m) / s), val);
    };
    const double inf = std::numeric_limits<double>::infinity();
    if (gf.truncation) add(normal::log_cdf((lo_cut - m) / s), value_at_point(lo_cut));
    if (n == 1) {
        piece(-inf, inf, phi[0]);
    } else {
        piece(-inf, gr.coord(0), phi[0]);
        for (std::size_t i = 0; i + 1 < n; ++i) piece(gr.coord(i), gr.coord(i + 1), min(phi[i], phi[i + 1]));
        piece(gr.coord(n - 1), inf, phi[n - 1]);
    }
    if (pos_inf) return ExtReal::pos_inf();
    const double l = log_sum_exp(terms);
    if (l == -inf) return ExtReal::neg_inf();
    return ExtReal(eps * l);
}

inline std::size_t nearest_node(const Grid& gr, double y) {
    const std::size_t n = gr.size();
    if (n == 1 || y <= gr.coord(0)) return 0;
    if (y >= gr.coord(n - 1)) return n - 1;
    const double t = (y - gr.coord(0)) / gr.axis(0).step();
    return std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::llround(t)));
}

}  // namespace detail

/// F(φ). Continuous variants accept any 1-D grid.
inline ExtReal evaluate(const QuasiLinearForm& F, const GridFn& phi) {
    return std::visit(
        [&](const auto& f) -> ExtReal {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, form::MaxPlus>) {
                require_same_grid(phi.grid, f.density.grid, "evaluate: φ must live on the form's grid");
                ExtReal best = ExtReal::neg_inf();
                for (std::size_t i = 0; i < phi.size(); ++i) best = oplus(best, minus(phi[i], f.density[i]));
                return best;
            } else if constexpr (std::is_same_v<T, form::LogIntegral>) {
                require_same_grid(phi.grid, f.grid, "evaluate: φ must live on the form's grid");
                std::vector<double> t;
                t.reserve(phi.size());
                for (std::size_t i = 0; i < phi.size(); ++i) {
                    if (phi[i].is_neg_inf() || f.log_weights[i] == -std::numeric_limits<double>::infinity()) continue;
                    if (phi[i].is_pos_inf()) return ExtReal::pos_inf();
                    t.push_back(f.log_weights[i] + phi[i].value() / f.epsilon);
                }
                const double l = detail::log_sum_exp(t);
                return l == -std::numeric_limits<double>::infinity() ? ExtReal::neg_inf() : ExtReal(f.epsilon * l);
            } else if constexpr (std::is_same_v<T, form::Empirical>) {
                if (phi.grid.dim() != 1) throw error(errc::invalid_argument, "continuous forms need a 1-D grid");
                std::vector<double> t;
                t.reserve(f.samples.size());
                for (std::size_t i = 0; i < f.samples.size(); ++i) {
                    const ExtReal p = phi[detail::nearest_node(phi.grid, f.samples[i])];
                    if (p.is_neg_inf()) continue;
                    if (p.is_pos_inf()) return ExtReal::pos_inf();
                    t.push_back(f.log_weights[i] + p.value() / f.epsilon);
                }
                const double l = detail::log_sum_exp(t);
                return l == -std::numeric_limits<double>::infinity() ? ExtReal::neg_inf() : ExtReal(f.epsilon * l);
            } else if constexpr (std::is_same_v<T, form::Gaussian>) {
                return detail::gaussian_envelope(f, phi);
            } else if constexpr (std::is_same_v<T, form::GaussianQuadratic>) {
                ExtReal best = ExtReal::neg_inf();
                for (double xi : f.xi_grid) {
                    const double m = f.mean_coef[0] + f.mean_coef[1] * xi + f.mean_coef[2] * xi * xi;
                    best = oplus(best, detail::gaussian_envelope({f.epsilon, m, f.var_coef * xi * xi, {}}, phi));
                }
                return best;
            } else {
                ExtReal best = ExtReal::neg_inf();
                for (const auto& m : f.members) best = oplus(best, evaluate(m, phi));
                return best;
            }
        },
        F.v);
}

/// Exact F(y ↦ slope·y) for the continuous variants; nullopt for grid variants.
inline std::optional<ExtReal> evaluate_linear(const QuasiLinearForm& F, double slope) {
    return std::visit(
        [&](const auto& f) -> std::optional<ExtReal> {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, form::MaxPlus> || std::is_same_v<T, form::LogIntegral>) {
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, form::Empirical>) {
                std::vector<double> t(f.samples.size());
                for (std::size_t i = 0; i < t.size(); ++i) t[i] = f.log_weights[i] + slope * f.samples[i] / f.epsilon;
                return ExtReal(f.epsilon * detail::log_sum_exp(t));
            } else if constexpr (std::is_same_v<T, form::Gaussian>) {
                if (slope == 0.0) return ExtReal::zero();
                const double base = slope * f.mean + 0.5 * slope * slope * (f.variance / f.epsilon);
                if (!f.truncation) return ExtReal(base);
                const double a = *f.truncation;
                if (f.variance == 0.0) return ExtReal(slope * std::max(f.mean, a));
                // E e^{λ max(S,a)} = Φ((a-m)/s) e^{λa} + e^{λm + λ²s²/2} Φ((m + λs² - a)/s), λ = slope/ε
                const double s = std::sqrt(f.variance);
                const double lam = slope / f.epsilon;
                const double log_hi = normal::log_cdf((f.mean + lam * f.variance - a) / s);
                const double log_lo = normal::log_cdf((a - f.mean) / s) + (slope * a - base) / f.epsilon;
                return ExtReal(base + f.epsilon * detail::log_sum_exp2(log_hi, log_lo));
            } else if constexpr (std::is_same_v<T, form::GaussianQuadratic>) {
                // sup over ξ ∈ R of slope·mean(ξ) + slope²·variance(ξ)/(2ε) = Aξ² + Bξ + C
                const double A = slope * f.mean_coef[2] + 0.5 * slope * slope * (f.var_coef / f.epsilon);
                const double B = slope * f.mean_coef[1];
                const double C = slope * f.mean_coef[0];
                if (A > 0.0) return ExtReal::pos_inf();
                if (A == 0.0) return B == 0.0 ? ExtReal(C) : ExtReal::pos_inf();
                return ExtReal(C - B * B / (4.0 * A));
            } else {
                ExtReal best = ExtReal::neg_inf();
                for (const auto& m : f.members) {
                    auto r = evaluate_linear(m, slope);
                    if (!r) return std::nullopt;
                    best = oplus(best, *r);
                }
                return best;
            }
        },
        F.v);
}

/// F(b(x_i, ·)), using the exact linear closed form when the kernel is the 1-D bilinear one.
inline ExtReal evaluate_row(const QuasiLinearForm& F, const Kernel& k, std::size_t ix) {
    if (k.is_bilinear() && k.x_grid().dim() == 1)
        if (auto r = evaluate_linear(F, k.x_grid().coord(ix))) return *r;
    return evaluate(F, k.row(ix));
}

/// F(1_A).
inline ExtReal eval_on_set(const QuasiLinearForm& F, const Grid& grid, const NodeMask& A) {
    return evaluate(F, indicator(grid, A));
}

// --------------------------------------------------------------------------

struct RhoEstimate {
    double rho_hat = -std::numeric_limits<double>::infinity();
    std::optional<GridFn> phi, psi;  // witness pair
    std::size_t isotone_violations = 0;
    double max_homogeneity_error = 0.0;
};

/// Lower bound on ρ(F) from random pairs on `grid`; also audits isotonicity and
/// additive homogeneity. Values are dyadic, so exact variants stay exact.
inline RhoEstimate rho_estimate(const QuasiLinearForm& F, const Grid& grid, std::size_t n_pairs, std::uint64_t seed) {
    if (n_pairs < 1) throw error(errc::invalid_argument, "rho_estimate: n_pairs >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> val(-24, 24);
    std::uniform_int_distribution<int> lam(-32, 32);
    std::bernoulli_distribution hole(0.1);
    auto draw = [&] {
        std::vector<ExtReal> v(grid.size());
        for (auto& x : v) x = hole(rng) ? ExtReal::neg_inf() : ExtReal(val(rng) / 8.0);
        return GridFn(grid, std::move(v));
    };
    RhoEstimate out;
    for (std::size_t p = 0; p < n_pairs; ++p) {
        GridFn a = draw(), b = draw();
        GridFn j = a;
        for (std::size_t i = 0; i < j.size(); ++i) j[i] = oplus(a[i], b[i]);
        const ExtReal fa = evaluate(F, a), fb = evaluate(F, b), fj = evaluate(F, j);
        if (fa > fj || fb > fj) ++out.isotone_violations;
        const ExtReal m = oplus(fa, fb);
        double inc;
        if (fj == m) inc = 0.0;
        else inc = minus(fj, m).is_finite() ? minus(fj, m).value() : (fj > m ? std::numeric_limits<double>::infinity() : 0.0);
        if (inc > out.rho_hat) {
            out.rho_hat = inc;
            out.phi = a;
            out.psi = b;
        }
        const double l = lam(rng) / 8.0;
        GridFn s = a;
        for (auto& x : s.values) x = otimes(x, ExtReal(l));
        const ExtReal fs = evaluate(F, s), expect = otimes(fa, ExtReal(l));
        if (!(fs == expect)) {
            const double e = (fs.is_finite() && expect.is_finite()) ? std::abs(fs.value() - expect.value())
                                                                     : std::numeric_limits<double>::infinity();
            out.max_homogeneity_error = std::max(out.max_homogeneity_error, e);
        }
    }
    return out;
}

/// Density f(y) = -F({y}) of a max-plus linear form.
inline GridFn density_of(const QuasiLinearForm& F, const Grid& grid, double tol = 1e-12, std::size_t n_pairs = 200,
                         std::uint64_t seed = 0) {
    const RhoEstimate r = rho_estimate(F, grid, n_pairs, seed);
    if (r.rho_hat > tol) throw error(errc::not_max_plus_linear, "density_of: the form is not max-plus linear");
    GridFn f = GridFn::constant(grid, ExtReal::zero());
    NodeMask a(grid.size(), false);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        a[i] = true;
        f[i] = -eval_on_set(F, grid, a);
        a[i] = false;
    }
    f.tag = Semicontinuity::lsc;
    return f;
}

// --------------------------------------------------------------------------

struct TightnessTrace {
    bool tight_evidence = false;
    std::vector<ExtReal> trace;  // F(K_i^c)
};

/// Reads a trace of F(K_i^c) over nested windows. Evidence of tightness: the
/// trace reaches `floor` (or -inf), or it keeps falling without levelling off
/// (strictly decreasing, last drop at least a quarter of the largest drop).
inline bool trace_shows_tightness(const std::vector<ExtReal>& trace, double floor) {
    if (trace.empty()) return false;
    if (trace.back() <= ExtReal(floor)) return true;
    if (trace.size() < 2) return false;
    double largest = 0.0, last = 0.0;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (!(trace[i] < trace[i - 1])) return false;
        if (!trace[i - 1].is_finite()) return false;
        last = trace[i - 1].value() - trace[i].value();
        largest = std::max(largest, last);
    }
    return last >= 0.25 * largest;
}

inline TightnessTrace tightness_check(const QuasiLinearForm& F, const Grid& grid, const std::vector<NodeMask>& windows,
                                      double floor = -1e6) {
    TightnessTrace t;
    for (std::size_t w = 0; w < windows.size(); ++w) {
        if (windows[w].size() != grid.size()) throw error(errc::grid_mismatch, "tightness_check: window size");
        if (w > 0)
            for (std::size_t i = 0; i < grid.size(); ++i)
                if (windows[w - 1][i] && !windows[w][i])
                    throw error(errc::invalid_argument, "tightness_check: windows must be nested");
        NodeMask comp(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) comp[i] = !windows[w][i];
        t.trace.push_back(eval_on_set(F, grid, comp));
    }
    t.tight_evidence = trace_shows_tightness(t.trace, floor);
    return t;
}

// --------------------------------------------------------------------------

/// G(φ) = F(φ ∘ χ_a) with χ_a(y) = max(y, a).
inline QuasiLinearForm truncate_form(const QuasiLinearForm& F, double a) {
    return std::visit(
        [&](const auto& f) -> QuasiLinearForm {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, form::Empirical>) {
                form::Empirical g = f;
                for (auto& s : g.samples) s = std::max(s, a);
                return {g};
            } else if constexpr (std::is_same_v<T, form::Gaussian>) {
                form::Gaussian g = f;
                g.truncation = g.truncation ? std::max(*g.truncation, a) : a;
                return {g};
            } else if constexpr (std::is_same_v<T, form::SupFamily>) {
                std::vector<QuasiLinearForm> ms;
                for (const auto& m : f.members) ms.push_back(truncate_form(m, a));
                return QuasiLinearForm::sup_family(std::move(ms));
            } else {
                throw error(errc::invalid_argument,
                            "truncate_form: supported for empirical, Gaussian and sup-family forms only");
            }
        },
        F.v);
}

}  // namespace moreau
