#pragma once

// Existence and uniqueness of pre-images: find f with Bf <= g on X and
// Bf = g on X'. The pieces (∂°g)^{-1}(y), y in ldom(B°g), must cover
// X' ∩ udom g; essential pieces decide uniqueness.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "moreau/conjugacy.hpp"

namespace moreau {

struct CoveringOptions {
    /// Stencil radius for topological neighbourhoods on Y. Radius 0 is the
    /// discrete topology, where topological and algebraic essentiality agree.
    /// `verdict` uses radius 0 whenever it treats Y as discrete.
    std::size_t stencil_radius = 1;
    unsigned threads = 1;
};

struct CoveringReport {
    NodeSet target;                 // X' ∩ udom g
    GridFn dual;                    // B°g
    NodeMask piece_index;           // ldom(B°g) on Y
    std::vector<NodeSet> pieces;    // (∂°g)^{-1}(y); empty outside ldom(B°g)
    std::vector<std::size_t> cover_count;  // per x-node, pieces containing it
    bool covered = false;
    NodeSet uncovered;
    NodeSet alg_essential;          // Z_a
    NodeSet top_essential;          // Z_t
    NodeSet Z;                      // Z_a ∪ int(Z_t)
    NodeSet Z_boundary;             // nodes of Z next to an open side of the Y window
    bool minimal_alg = false;
    bool minimal_top = false;
    std::size_t stencil_radius = 1;
};

inline CoveringReport build_covering(const GridFn& g, const Kernel& k, const NodeSet& xprime,
                                     const CoveringOptions& opt = {}) {
    require_same_grid(g.grid, k.x_grid(), "build_covering: g must live on the kernel's x-grid");
    const std::size_t nx = k.x_grid().size(), ny = k.y_grid().size();
    const Grid& yg = k.y_grid();

    SubdiffMap sd = subdifferential_map(g, k, opt.threads);
    CoveringReport rep;
    rep.stencil_radius = opt.stencil_radius;
    rep.dual = sd.dual;
    rep.piece_index.assign(ny, false);
    rep.pieces.assign(ny, {});
    for (std::size_t j = 0; j < ny; ++j) {
        if (sd.dual[j].is_pos_inf()) continue;
        rep.piece_index[j] = true;
        rep.pieces[j] = std::move(sd.inverse[j]);
    }

    NodeMask in_target(nx, false);
    for (auto i : xprime) {
        if (i >= nx) throw error(errc::invalid_argument, "X' node index out of range");
        if (!g[i].is_neg_inf()) in_target[i] = true;
    }
    rep.target = to_set(in_target);

    rep.cover_count.assign(nx, 0);
    for (std::size_t j = 0; j < ny; ++j)
        for (auto i : rep.pieces[j]) ++rep.cover_count[i];
    for (auto i : rep.target)
        if (rep.cover_count[i] == 0) rep.uncovered.push_back(i);
    rep.covered = rep.uncovered.empty();

    // removing the pieces of `removed` uncovers a covered target node
    std::vector<std::size_t> hits(nx, 0);
    auto uncovers = [&](const NodeSet& removed) {
        NodeSet touched;
        for (auto j : removed)
            for (auto i : rep.pieces[j]) {
                if (hits[i]++ == 0) touched.push_back(i);
            }
        bool out = false;
        for (auto i : touched) {
            if (in_target[i] && hits[i] == rep.cover_count[i]) out = true;
            hits[i] = 0;
        }
        return out;
    };

    NodeMask za(ny, false), zt(ny, false);
    for (std::size_t j = 0; j < ny; ++j) {
        if (!rep.piece_index[j]) continue;
        za[j] = uncovers({j});
        NodeSet ball;
        for (auto q : yg.ball(j, opt.stencil_radius))
            if (rep.piece_index[q]) ball.push_back(q);
        zt[j] = za[j] || uncovers(ball);
    }
    rep.alg_essential = to_set(za);
    rep.top_essential = to_set(zt);

    // interior of Z_t relative to dom(B°g)
    const DomainMask dm = domain_masks(rep.dual, 0);
    NodeMask z = za;
    for (std::size_t j = 0; j < ny; ++j) {
        if (!zt[j] || !dm.dom[j]) continue;
        bool interior = true;
        for (auto q : yg.ball(j, opt.stencil_radius))
            if (dm.dom[q] && !zt[q]) interior = false;
        if (interior) z[j] = true;
    }
    rep.Z = to_set(z);
    for (auto j : rep.Z)
        if (yg.touches_open_edge(j, opt.stencil_radius)) rep.Z_boundary.push_back(j);

    rep.minimal_alg = rep.minimal_top = true;
    for (std::size_t j = 0; j < ny; ++j) {
        if (!rep.piece_index[j]) continue;
        if (!za[j]) rep.minimal_alg = false;
        if (!zt[j]) rep.minimal_top = false;
    }
    return rep;
}

// --------------------------------------------------------------------------

struct QuasicontinuityResult {
    bool holds = true;
    std::optional<std::size_t> witness;
    double worst_excess = 0.0;  // max of (lsc(usc f) - f) - tau * local jump
};

/// lsc hull of the usc hull, both by stencil on dom f, compared with f.
/// A node fails when the hull exceeds f by more than tau times the largest
/// jump of f within twice the stencil radius; this absorbs the O(h^2) gap
/// that any sampled smooth function shows at its minima.
inline QuasicontinuityResult quasicontinuity_check(const GridFn& f, std::size_t stencil_radius = 1, double tau = 0.5) {
    const Grid& gr = f.grid;
    const std::size_t n = gr.size();
    const DomainMask dm = domain_masks(f, 0);
    std::vector<ExtReal> u(n, ExtReal::neg_inf());
    for (std::size_t z = 0; z < n; ++z) {
        if (!dm.dom[z]) continue;
        for (auto q : gr.ball(z, stencil_radius))
            if (dm.dom[q]) u[z] = oplus(u[z], f[q]);
    }
    QuasicontinuityResult res;
    for (std::size_t z = 0; z < n; ++z) {
        if (!dm.dom[z]) continue;
        ExtReal l = ExtReal::pos_inf();
        for (auto q : gr.ball(z, stencil_radius))
            if (dm.dom[q]) l = min(l, u[q]);
        double jump = 0.0;
        for (auto q : gr.ball(z, 2 * stencil_radius))
            if (dm.dom[q]) jump = std::max(jump, std::abs(f[q].value() - f[z].value()));
        const double excess = (l.value() - f[z].value()) - tau * jump;
        if (excess > 0.0) {
            if (res.holds) res.witness = z;
            res.holds = false;
        }
        res.worst_excess = std::max(res.worst_excess, excess);
    }
    return res;
}

// --------------------------------------------------------------------------

struct PreimageResult {
    GridFn f;                  // candidate B°g
    GridFn Bf;
    ExtReal max_excess;        // max over X of Bf - g (<= 0 required)
    double equality_residual;  // max over X' of |Bf - g| among finite pairs
    NodeSet inequality_nodes;  // Bf > g
    NodeSet mismatch_nodes;    // X' nodes where Bf != g
    bool exact = false;        // Bf <= g and Bf == g on X', as ExtReal comparisons
    bool pass = false;         // exact, or within tolerance
};

inline PreimageResult solve_preimage(const GridFn& g, const Kernel& k, const NodeSet& xprime, double tol = 0.0,
                                     unsigned threads = 1) {
    require_same_grid(g.grid, k.x_grid(), "solve_preimage: g must live on the kernel's x-grid");
    PreimageResult r{dual_conjugate(g, k, threads), GridFn(), ExtReal::neg_inf(), 0.0, {}, {}, false, false};
    r.Bf = conjugate(r.f, k, threads);
    const std::size_t nx = g.size();
    bool le_ok = true, eq_ok = true, le_tol = true, eq_tol = true;
    for (std::size_t i = 0; i < nx; ++i) {
        // equal infinities count as a zero gap
        if (r.Bf[i] == g[i]) {
            r.max_excess = oplus(r.max_excess, ExtReal::zero());
            continue;
        }
        r.max_excess = oplus(r.max_excess, minus(r.Bf[i], g[i]));
        if (r.Bf[i] > g[i]) {
            le_ok = false;
            r.inequality_nodes.push_back(i);
            if (!(r.Bf[i].is_finite() && g[i].is_finite() && r.Bf[i].value() - g[i].value() <= tol)) le_tol = false;
        }
    }
    for (auto i : xprime) {
        if (r.Bf[i] == g[i]) continue;
        eq_ok = false;
        r.mismatch_nodes.push_back(i);
        if (r.Bf[i].is_finite() && g[i].is_finite()) {
            const double e = std::abs(r.Bf[i].value() - g[i].value());
            r.equality_residual = std::max(r.equality_residual, e);
            if (e > tol) eq_tol = false;
        } else {
            eq_tol = false;
        }
    }
    r.exact = le_ok && eq_ok;
    r.pass = r.exact || (le_tol && eq_tol);
    return r;
}

// --------------------------------------------------------------------------

enum class Existence { yes, no, yes_if_assumptions, unknown };
enum class Uniqueness { unique, not_unique, unknown };

inline const char* to_string(Existence e) {
    switch (e) {
        case Existence::yes: return "YES";
        case Existence::no: return "NO";
        case Existence::yes_if_assumptions: return "YES_IF_ASSUMPTIONS";
        case Existence::unknown: return "UNKNOWN";
    }
    return "UNKNOWN";
}

inline const char* to_string(Uniqueness u) {
    switch (u) {
        case Uniqueness::unique: return "UNIQUE";
        case Uniqueness::not_unique: return "NOT_UNIQUE";
        case Uniqueness::unknown: return "UNKNOWN";
    }
    return "UNKNOWN";
}

struct AssumptionRecord {
    bool a1_discrete = false;        // Y discrete
    bool a1p_dual_finite = false;    // b continuous in y (vacuous on a grid) and B°g > -inf
    bool a2_dual_in_fc = false;      // B°g in F_c
    bool a2p_coercive = false;       // b coercive and X' ⊂ idom g ∪ g^{-1}(-inf)
    bool a3 = false;
    std::vector<std::string> notes;
};

struct VerdictOptions {
    CoveringOptions covering{};
    /// Treat Y as the discrete space it is. When false the grid stands in for a
    /// continuum and the assumptions are checked through window evidence.
    bool discrete = true;
    double certificate_tol = 0.0;
    double quasicontinuity_tau = 0.5;
    CoercivityOptions coercivity{};
    FcOptions fc{};
};

struct Verdict {
    Existence existence = Existence::unknown;
    Uniqueness uniqueness = Uniqueness::unknown;
    AssumptionRecord assumptions;
    PreimageResult certificate;
    CoveringReport covering;
    QuasicontinuityResult quasicontinuity;
};

inline AssumptionRecord check_assumptions(const GridFn& g, const Kernel& k, const NodeSet& xprime, const GridFn& dual,
                                          const VerdictOptions& opt) {
    AssumptionRecord a;
    if (opt.discrete) {
        a.a1_discrete = true;
        a.a2_dual_in_fc = true;
        a.notes.emplace_back("Y is a finite discrete grid: every superlevel set is finite, so B°g lies in F_c");
    } else {
        a.notes.emplace_back("continuum proxy: Y is treated as a window into an unbounded space");
        a.a2_dual_in_fc = fc_membership(dual, k, opt.fc).overall == Evidence::evidence;
    }
    a.a1p_dual_finite = std::none_of(dual.values.begin(), dual.values.end(), [](ExtReal v) { return v.is_neg_inf(); });
    a.notes.emplace_back("continuity of b in y is vacuous on a grid");

    const DomainMask dm = domain_masks(g, opt.covering.stencil_radius);
    bool xp_ok = true;
    for (auto i : xprime)
        if (!(dm.idom[i] || g[i].is_neg_inf())) xp_ok = false;
    CoercivityOptions co = opt.coercivity;
    co.stencil_radius = std::max<std::size_t>(co.stencil_radius, 1);
    a.a2p_coercive = xp_ok && coercivity_report(k, co).coercive == Evidence::evidence;

    a.a3 = (a.a1_discrete || a.a1p_dual_finite) && (a.a2_dual_in_fc || a.a2p_coercive);
    return a;
}

inline Verdict verdict(const GridFn& g, const Kernel& k, const NodeSet& xprime, const VerdictOptions& opt = {}) {
    Verdict v;
    CoveringOptions co = opt.covering;
    // singletons are open in a discrete space
    if (opt.discrete) co.stencil_radius = 0;
    v.covering = build_covering(g, k, xprime, co);
    v.certificate = solve_preimage(g, k, xprime, opt.certificate_tol, opt.covering.threads);
    v.assumptions = check_assumptions(g, k, xprime, v.covering.dual, opt);
    v.quasicontinuity = quasicontinuity_check(v.covering.dual, co.stencil_radius, opt.quasicontinuity_tau);
    const bool a3 = v.assumptions.a3;

    if (v.covering.covered || v.certificate.exact) {
        v.existence = Existence::yes;
    } else if (v.certificate.pass) {
        v.existence = Existence::yes_if_assumptions;
    } else if (a3) {
        v.existence = Existence::no;
    }

    const bool exists = v.existence == Existence::yes || v.existence == Existence::yes_if_assumptions;
    if (v.covering.covered && v.covering.minimal_top && v.quasicontinuity.holds && a3) {
        v.uniqueness = Uniqueness::unique;
    } else if (exists && !v.covering.minimal_top && a3) {
        v.uniqueness = Uniqueness::not_unique;
    }
    return v;
}

}  // namespace moreau
