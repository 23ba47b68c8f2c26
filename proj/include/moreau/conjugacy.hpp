#pragma once

// Moreau conjugacies on grids.
//
//   B f (x)  = max_y  b(x, y) - f(y)      (f on Y, result on X)
//   B°g (y)  = max_x  b(x, y) - g(x)      (conjugate with the transposed kernel)
//
// plus generalized subdifferentials, a fast Legendre-Fenchel path for the
// 1-D bilinear kernel, and window-based coercivity diagnostics.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "moreau/kernel.hpp"
#include "moreau/parallel.hpp"

namespace moreau {

struct ConjugateResult {
    GridFn value;                   // on the kernel's X-grid
    std::vector<NodeSet> argmax;    // all y-nodes attaining the max, per x-node
};

inline ConjugateResult conjugate_with_argmax(const GridFn& f, const Kernel& k, unsigned threads = 1) {
    require_same_grid(f.grid, k.y_grid(), "conjugate: f must live on the kernel's y-grid");
    const std::size_t nx = k.x_grid().size(), ny = k.y_grid().size();
    std::vector<ExtReal> out(nx, ExtReal::neg_inf());
    std::vector<NodeSet> arg(nx);
    parallel_for(nx, threads, [&](std::size_t i) {
        ExtReal best = ExtReal::neg_inf();
        NodeSet& a = arg[i];
        for (std::size_t j = 0; j < ny; ++j) {
            const ExtReal v = minus(k(i, j), f[j]);
            if (v > best) {
                best = v;
                a.clear();
                a.push_back(j);
            } else if (v == best) {
                a.push_back(j);
            }
        }
        out[i] = best;
    });
    return {GridFn(k.x_grid(), std::move(out)), std::move(arg)};
}

/// B f. The dual conjugacy B°g is conjugate(g, k.transpose()).
inline GridFn conjugate(const GridFn& f, const Kernel& k, unsigned threads = 1) {
    require_same_grid(f.grid, k.y_grid(), "conjugate: f must live on the kernel's y-grid");
    const std::size_t nx = k.x_grid().size(), ny = k.y_grid().size();
    std::vector<ExtReal> out(nx, ExtReal::neg_inf());
    parallel_for(nx, threads, [&](std::size_t i) {
        ExtReal best = ExtReal::neg_inf();
        for (std::size_t j = 0; j < ny; ++j) best = oplus(best, minus(k(i, j), f[j]));
        out[i] = best;
    });
    return GridFn(k.x_grid(), std::move(out));
}

inline GridFn dual_conjugate(const GridFn& g, const Kernel& k, unsigned threads = 1) {
    return conjugate(g, k.transpose(), threads);
}

/// Legendre-Fenchel transform max_y (x*y - f(y)) for 1-D grids.
///
/// An upper-hull pass over (y, -f(y)) prunes every point whose vertical gap
/// below the hull exceeds the floating-point evaluation error; each x then
/// only evaluates the surviving points near its tangency. The surviving
/// values are computed with the same expression as `conjugate`, so the
/// result is bit-identical to the brute-force maximum.
inline GridFn legendre_fast(const GridFn& f, const Grid& x_grid) {
    const Grid& yg = f.grid;
    if (yg.dim() != 1 || x_grid.dim() != 1) throw error(errc::invalid_argument, "legendre_fast needs 1-D grids");
    const std::size_t ny = yg.size(), nx = x_grid.size();

    std::size_t finite = 0;
    bool has_neg_inf = false;
    for (const auto& v : f.values) {
        if (v.is_finite()) ++finite;
        if (v.is_neg_inf()) has_neg_inf = true;
    }
    if (finite == 0) throw error(errc::invalid_argument, "legendre_fast needs at least one finite value");
    if (has_neg_inf) return GridFn::constant(x_grid, ExtReal::pos_inf());

    struct Pt {
        double y, v;  // v = -f(y)
        double h = 0; // hull value at y
    };
    std::vector<Pt> pts;
    pts.reserve(finite);
    double ymax = 0, vmax = 0;
    for (std::size_t j = 0; j < ny; ++j) {
        if (!f[j].is_finite()) continue;
        pts.push_back({yg.coord(j), -f[j].value()});
        ymax = std::max(ymax, std::abs(pts.back().y));
        vmax = std::max(vmax, std::abs(pts.back().v));
    }
    double xmax = 0;
    for (std::size_t i = 0; i < nx; ++i) xmax = std::max(xmax, std::abs(x_grid.coord(i)));

    // monotone chain, upper hull; points arrive sorted by y
    std::vector<std::size_t> hull;
    auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
        return (pts[a].y - pts[o].y) * (pts[b].v - pts[o].v) - (pts[a].v - pts[o].v) * (pts[b].y - pts[o].y);
    };
    for (std::size_t j = 0; j < pts.size(); ++j) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), j) >= 0) hull.pop_back();
        hull.push_back(j);
    }

    const double eps = std::numeric_limits<double>::epsilon();
    const double slack = 64.0 * eps * (2.0 * xmax * ymax + 2.0 * vmax + 1.0);

    // hull value at every point, then keep the near-hull ones
    std::vector<Pt> kept;
    std::vector<std::size_t> kept_pos_of_hull(hull.size());
    {
        std::size_t seg = 0;
        std::size_t hv = 0;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            while (seg + 1 < hull.size() && pts[hull[seg + 1]].y < pts[j].y) ++seg;
            double h;
            if (hull.size() == 1 || pts[j].y <= pts[hull[seg]].y) {
                h = pts[hull[seg]].v;
            } else {
                const Pt& a = pts[hull[seg]];
                const Pt& b = pts[hull[std::min(seg + 1, hull.size() - 1)]];
                h = b.y == a.y ? std::max(a.v, b.v) : a.v + (b.v - a.v) * ((pts[j].y - a.y) / (b.y - a.y));
            }
            const bool is_vertex = hv < hull.size() && hull[hv] == j;
            if (is_vertex || h - pts[j].v <= slack) {
                if (is_vertex) kept_pos_of_hull[hv++] = kept.size();
                Pt p = pts[j];
                p.h = is_vertex ? p.v : h;
                kept.push_back(p);
            }
        }
    }

    auto eval = [](double x, const Pt& p) { return minus(ExtReal(x * p.y), ExtReal(-p.v)); };

    std::vector<ExtReal> out(nx);
    std::size_t k = 0;
    for (std::size_t i = 0; i < nx; ++i) {
        const double x = x_grid.coord(i);
        while (k + 1 < hull.size() && eval(x, pts[hull[k + 1]]) >= eval(x, pts[hull[k]])) ++k;
        const std::size_t pos = kept_pos_of_hull[k];
        ExtReal best = eval(x, kept[pos]);
        const double bound0 = x * kept[pos].y + kept[pos].h;
        for (std::size_t q = pos + 1; q < kept.size(); ++q) {
            const double bound = x * kept[q].y + kept[q].h;
            if (bound < best.value() - 2 * slack && bound < bound0 - 2 * slack) break;
            best = oplus(best, eval(x, kept[q]));
        }
        for (std::size_t q = pos; q-- > 0;) {
            const double bound = x * kept[q].y + kept[q].h;
            if (bound < best.value() - 2 * slack && bound < bound0 - 2 * slack) break;
            best = oplus(best, eval(x, kept[q]));
        }
        out[i] = best;
    }
    return GridFn(x_grid, std::move(out));
}

// --------------------------------------------------------------------------
// Subdifferentials

/// y in ∂°g(x) iff b(x,y) is finite and b(x,y) - g(x) >= b(x',y) - g(x') for all x'.
struct SubdiffMap {
    GridFn dual;                     // B°g on Y
    std::vector<NodeSet> at_x;       // ∂°g(x), y-nodes
    std::vector<NodeSet> inverse;    // (∂°g)^{-1}(y), x-nodes
};

inline SubdiffMap subdifferential_map(const GridFn& g, const Kernel& k, unsigned threads = 1) {
    require_same_grid(g.grid, k.x_grid(), "subdifferential_map: g must live on the kernel's x-grid");
    const Kernel kt = k.transpose();
    ConjugateResult r = conjugate_with_argmax(g, kt, threads);
    const std::size_t nx = k.x_grid().size(), ny = k.y_grid().size();
    SubdiffMap m{std::move(r.value), std::vector<NodeSet>(nx), std::vector<NodeSet>(ny)};
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i : r.argmax[j]) {
            if (!k(i, j).is_finite()) continue;
            m.inverse[j].push_back(i);
            m.at_x[i].push_back(j);
        }
    }
    return m;
}

// --------------------------------------------------------------------------
// Coercivity diagnostics. A grid can only sample behaviour at infinity, so
// every verdict is EVIDENCE or VIOLATION relative to the inner window.

enum class Evidence { evidence, violation };

inline const char* to_string(Evidence e) { return e == Evidence::evidence ? "EVIDENCE" : "VIOLATION"; }

struct CoercivityOptions {
    double window_margin = 0.1;
    /// Sublevel thresholds, as fractions of max_y b_{x,V}(y) per x-node.
    std::vector<double> beta_fractions{0.1, 0.25, 0.5};
    std::size_t stencil_radius = 1;
    /// Skip x-nodes whose neighbourhood is cut by an open side of the X window
    /// (kept when the X-grid has no other nodes).
    bool skip_open_x_edges = true;
};

struct CoercivityNode {
    bool tested = true;
    bool open_edge = false;
    bool coercive = true;
    bool upper_coercive = true;
};

struct CoercivityReport {
    std::vector<CoercivityNode> nodes;
    Evidence coercive = Evidence::evidence;
    /// On a grid every neighbourhood is already finite, so this equals `coercive`.
    Evidence strongly_coercive = Evidence::evidence;
    Evidence upper_coercive = Evidence::evidence;
    std::string note = "strong coercivity coincides with coercivity on a grid (neighbourhoods are finite)";
};

inline CoercivityReport coercivity_report(const Kernel& k, const CoercivityOptions& opt = {}) {
    if (!(opt.window_margin > 0.0 && opt.window_margin < 0.5))
        throw error(errc::invalid_argument, "window_margin must lie in (0, 1/2)");
    const Grid& xg = k.x_grid();
    const Grid& yg = k.y_grid();
    const NodeMask inner = yg.inner_window(opt.window_margin);
    const std::size_t nx = xg.size(), ny = yg.size();

    bool any_interior = false;
    for (std::size_t i = 0; i < nx; ++i)
        if (!xg.touches_open_edge(i, opt.stencil_radius)) any_interior = true;

    CoercivityReport rep;
    rep.nodes.resize(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        CoercivityNode& node = rep.nodes[i];
        node.open_edge = xg.size() > 1 && xg.touches_open_edge(i, opt.stencil_radius);
        node.tested = !(opt.skip_open_x_edges && node.open_edge && any_interior);

        const auto ball = xg.ball(i, opt.stencil_radius);
        std::vector<ExtReal> bxv(ny);
        ExtReal top = ExtReal::neg_inf();
        for (std::size_t j = 0; j < ny; ++j) {
            ExtReal m = ExtReal::neg_inf();
            for (auto z : ball) m = oplus(m, k(z, j));
            bxv[j] = minus(m, k(i, j));
            if (bxv[j].is_finite()) top = oplus(top, bxv[j]);
        }
        for (double frac : opt.beta_fractions) {
            const double beta = top.is_finite() && top.value() > 0 ? frac * top.value() : 0.0;
            ExtReal band_max = ExtReal::neg_inf(), inner_max = ExtReal::neg_inf();
            bool band_hit = false;
            for (std::size_t j = 0; j < ny; ++j) {
                if (!(bxv[j] <= ExtReal(beta))) continue;
                if (inner[j]) {
                    inner_max = oplus(inner_max, k(i, j));
                } else {
                    band_hit = true;
                    band_max = oplus(band_max, k(i, j));
                }
            }
            if (band_hit) {
                node.coercive = false;
                if (band_max > inner_max) node.upper_coercive = false;
            }
        }
        if (node.tested) {
            if (!node.coercive) rep.coercive = Evidence::violation;
            if (!node.upper_coercive) rep.upper_coercive = Evidence::violation;
        }
    }
    rep.strongly_coercive = rep.coercive;
    return rep;
}

struct FcOptions {
    double window_margin = 0.1;
    /// Superlevel thresholds beta = max_y (b(x,y) - f(y)) - delta.
    std::vector<double> deltas{0.5, 1.0, 2.0};
};

struct FcReport {
    std::vector<Evidence> per_x;
    Evidence overall = Evidence::evidence;
};

/// Evidence that y -> b(x,y) - f(y) has relatively compact superlevel sets for every x.
inline FcReport fc_membership(const GridFn& f, const Kernel& k, const FcOptions& opt = {}) {
    require_same_grid(f.grid, k.y_grid(), "fc_membership: f must live on the kernel's y-grid");
    const NodeMask inner = k.y_grid().inner_window(opt.window_margin);
    const std::size_t nx = k.x_grid().size(), ny = k.y_grid().size();
    FcReport rep;
    rep.per_x.assign(nx, Evidence::evidence);
    std::vector<ExtReal> v(ny);
    for (std::size_t i = 0; i < nx; ++i) {
        ExtReal top = ExtReal::neg_inf();
        for (std::size_t j = 0; j < ny; ++j) {
            v[j] = minus(k(i, j), f[j]);
            top = oplus(top, v[j]);
        }
        if (top.is_neg_inf()) continue;  // every superlevel set is empty
        auto escapes = [&](ExtReal beta) {
            for (std::size_t j = 0; j < ny; ++j)
                if (v[j] >= beta && !inner[j]) return true;
            return false;
        };
        bool bad = false;
        if (top.is_pos_inf()) {
            bad = escapes(top);
        } else {
            for (double d : opt.deltas) bad = bad || escapes(ExtReal(top.value() - d));
        }
        if (bad) {
            rep.per_x[i] = Evidence::violation;
            rep.overall = Evidence::violation;
        }
    }
    return rep;
}

}  // namespace moreau
