#pragma once

// Generalized Gärtner-Ellis pipeline.
//
//   g(x) = sup_i limsup_n F_{n,i}(b(x, ·))
//
// then B°g, the covering of idom g by the pieces (∂°g)^{-1}(y), the set Z,
// and a verdict: FULL_LDP (rate B°g identified), BOUNDS_ONLY (upper bound on
// closed sets, lower bound on open sets through Z) or INCONCLUSIVE.

#include <string>
#include <vector>

#include "moreau/convergence.hpp"
#include "moreau/covering.hpp"

namespace moreau {

enum class GMode { limsup, limit_asserted };

inline const char* to_string(GMode m) { return m == GMode::limsup ? "limsup" : "limit"; }

enum class LdpVerdict { full_ldp, bounds_only, inconclusive };

inline const char* to_string(LdpVerdict v) {
    switch (v) {
        case LdpVerdict::full_ldp: return "FULL_LDP";
        case LdpVerdict::bounds_only: return "BOUNDS_ONLY";
        case LdpVerdict::inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

struct GartnerInput {
    std::vector<FormSequence> sequences;  // one per index i
    Kernel kernel;
    GMode mode = GMode::limit_asserted;
    /// liminf/limsup trends closer than this count as a limit
    double limit_tol = 1e-6;
    std::size_t stencil_radius = 1;
    double window_margin = 0.1;
    double quasicontinuity_tau = 0.5;
    /// The caller vouches for asymptotic tightness.
    bool assert_tightness = false;
    unsigned threads = 1;
};

struct GComputation {
    GridFn g;
    GMode mode = GMode::limit_asserted;  // after a possible downgrade
    std::vector<double> residual;        // per x, largest trend residual over i
    std::vector<std::string> warnings;
};

inline GComputation compute_g(const GartnerInput& in) {
    if (in.sequences.empty()) throw error(errc::invalid_argument, "compute_g: need at least one sequence");
    const Kernel& k = in.kernel;
    const std::size_t nx = k.x_grid().size();

    std::vector<std::vector<QuasiLinearForm>> forms;
    bool safe = true;
    for (const auto& s : in.sequences) {
        forms.push_back(detail::materialize(s));
        safe = safe && s.thread_safe;
    }

    std::vector<std::vector<Trend>> trends(nx, std::vector<Trend>(in.sequences.size()));
    parallel_for(nx, safe ? in.threads : 1, [&](std::size_t ix) {
        for (std::size_t i = 0; i < in.sequences.size(); ++i) {
            std::vector<ExtReal> v;
            for (const auto& f : forms[i]) v.push_back(evaluate_row(f, k, ix));
            trends[ix][i] = extrapolate(in.sequences[i].n_list, v);
        }
    });

    GComputation out{GridFn::constant(k.x_grid(), ExtReal::neg_inf()), in.mode, std::vector<double>(nx, 0.0), {}};
    for (std::size_t ix = 0; ix < nx; ++ix)
        for (const auto& t : trends[ix]) out.residual[ix] = std::max(out.residual[ix], t.residual);

    if (in.mode == GMode::limit_asserted) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            if (out.residual[ix] > in.limit_tol) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "liminf and limsup trends differ by %.3g at x-node %zu; falling back to limsup mode",
                              2 * out.residual[ix], ix);
                out.warnings.emplace_back(buf);
                out.mode = GMode::limsup;
                break;
            }
        }
    }
    for (std::size_t ix = 0; ix < nx; ++ix) {
        ExtReal best = ExtReal::neg_inf();
        for (const auto& t : trends[ix]) best = oplus(best, out.mode == GMode::limsup ? t.limsup : t.limit);
        out.g[ix] = best;
    }
    return out;
}

struct TightnessCriterion {
    bool holds_evidence = false;
    std::optional<std::size_t> x0;
    bool witness_found = false;
    Evidence strong_coercivity = Evidence::violation;
};

/// Looks for x0 in idom g with b(x0, ·) bounded below: on a window this means
/// b(x0, ·) does not sink toward the open sides of Y. Needs strong-coercivity
/// evidence as well.
inline TightnessCriterion tightness_criterion(const Kernel& k, const GridFn& g, std::size_t stencil_radius = 1,
                                              double window_margin = 0.1) {
    require_same_grid(g.grid, k.x_grid(), "tightness_criterion: g must live on the kernel's x-grid");
    TightnessCriterion tc;
    const DomainMask dm = domain_masks(g, stencil_radius);
    const NodeMask inner = k.y_grid().inner_window(window_margin);
    for (std::size_t ix = 0; ix < g.size() && !tc.x0; ++ix) {
        if (!dm.idom[ix]) continue;
        ExtReal inner_min = ExtReal::pos_inf(), band_min = ExtReal::pos_inf();
        for (std::size_t j = 0; j < k.y_grid().size(); ++j) {
            const ExtReal b = k(ix, j);
            if (inner[j]) inner_min = min(inner_min, b);
            else band_min = min(band_min, b);
        }
        if (inner_min.is_neg_inf() || band_min.is_neg_inf()) continue;
        if (band_min >= inner_min || band_min.is_pos_inf()) tc.x0 = ix;
    }
    tc.witness_found = tc.x0.has_value();
    CoercivityOptions co;
    co.window_margin = window_margin;
    co.stencil_radius = std::max<std::size_t>(stencil_radius, 1);
    tc.strong_coercivity = coercivity_report(k, co).strongly_coercive;
    tc.holds_evidence = tc.witness_found && tc.strong_coercivity == Evidence::evidence;
    return tc;
}

struct GartnerAssumptions {
    Evidence coercive = Evidence::violation;
    Evidence strongly_coercive = Evidence::violation;
    Evidence upper_coercive = Evidence::violation;
    Evidence dual_in_fc = Evidence::violation;
    bool dual_finite = false;            // B°g > -inf everywhere
    QuasicontinuityResult quasicontinuity;
    TightnessCriterion tightness;
    bool technical = false;              // combined technical assumption
};

struct GartnerOutput {
    GridFn g;
    GridFn rate_lower;  // B°g
    CoveringReport covering;
    NodeSet Z;
    LdpVerdict verdict = LdpVerdict::inconclusive;
    GMode mode = GMode::limit_asserted;
    GartnerAssumptions assumptions;
    QuasiLinearForm Fbar;  // max-plus form with density B°g
    std::vector<std::string> bounds;
    std::vector<std::string> warnings;
};

inline GartnerOutput pipeline(const GartnerInput& in) {
    GComputation gc = compute_g(in);
    const Kernel& k = in.kernel;

    const DomainMask dm = domain_masks(gc.g, in.stencil_radius);
    CoveringOptions co{in.stencil_radius, in.threads};
    CoveringReport cov = build_covering(gc.g, k, to_set(dm.idom), co);

    GartnerAssumptions as;
    CoercivityOptions cop;
    cop.window_margin = in.window_margin;
    cop.stencil_radius = std::max<std::size_t>(in.stencil_radius, 1);
    const CoercivityReport cr = coercivity_report(k, cop);
    as.coercive = cr.coercive;
    as.strongly_coercive = cr.strongly_coercive;
    as.upper_coercive = cr.upper_coercive;
    FcOptions fo;
    fo.window_margin = in.window_margin;
    as.dual_in_fc = fc_membership(cov.dual, k, fo).overall;
    as.dual_finite = std::none_of(cov.dual.values.begin(), cov.dual.values.end(), [](ExtReal v) { return v.is_neg_inf(); });
    as.quasicontinuity = quasicontinuity_check(cov.dual, in.stencil_radius, in.quasicontinuity_tau);
    as.tightness = tightness_criterion(k, gc.g, in.stencil_radius, in.window_margin);
    as.technical = as.dual_finite && (as.dual_in_fc == Evidence::evidence || as.coercive == Evidence::evidence) &&
                   as.upper_coercive == Evidence::evidence && as.quasicontinuity.holds;

    GartnerOutput out{gc.g, cov.dual, cov, cov.Z, LdpVerdict::inconclusive, gc.mode, as,
                      QuasiLinearForm::max_plus(cov.dual), {}, gc.warnings};
    out.Fbar = QuasiLinearForm::max_plus(GridFn(cov.dual.grid, cov.dual.values, Semicontinuity::lsc));

    const bool tight = as.tightness.holds_evidence || in.assert_tightness;
    if (!as.technical) out.warnings.emplace_back("technical assumption lacks evidence; verdict limited to what the covering gives");
    if (!tight) out.warnings.emplace_back("no tightness evidence and none asserted");

    if (cov.covered) {
        out.verdict = LdpVerdict::bounds_only;
        out.bounds.emplace_back("limsup_n F_n(C) <= -inf_{y in C} B°g(y) for every closed C");
        if (gc.mode == GMode::limit_asserted) {
            char buf[200];
            if (cov.Z.empty()) {
                std::snprintf(buf, sizeof buf, "liminf_n F_n(G) >= -inf_{y in G ∩ Z} B°g(y) for every open G, Z empty");
            } else {
                const Grid& yg = k.y_grid();
                std::snprintf(buf, sizeof buf,
                              "liminf_n F_n(G) >= -inf_{y in G ∩ Z} B°g(y) for every open G, Z has %zu nodes in [%.6g, %.6g]",
                              cov.Z.size(), yg.coord(cov.Z.front()), yg.coord(cov.Z.back()));
            }
            out.bounds.emplace_back(buf);
        }
        if (cov.minimal_top && gc.mode == GMode::limit_asserted && as.technical && tight)
            out.verdict = LdpVerdict::full_ldp;
    }
    return out;
}

/// CSV rows (y, B°g(y), in_Z).
inline std::string rate_csv(const GartnerOutput& o) {
    std::string s = "y,rate_lower,in_Z\n";
    NodeMask z(o.rate_lower.size(), false);
    for (auto j : o.Z) z[j] = true;
    char buf[48];
    for (std::size_t j = 0; j < o.rate_lower.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", o.rate_lower.grid.coord(j));
        s += std::string(buf) + "," + to_string(o.rate_lower[j]) + "," + (z[j] ? "1" : "0") + "\n";
    }
    return s;
}

}  // namespace moreau
