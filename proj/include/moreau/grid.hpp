#pragma once

// Uniform rectangular grids in dimension 1 or 2, functions sampled on them,
// and the stencil topology used wherever a neighbourhood is needed.
//
// Each axis side carries an `open` flag: true means the side is a window
// edge standing in for an unbounded direction (e.g. the +inf end of
// [a, +inf)), false means it is a genuine boundary of the space. Only open
// sides count as "escaping to infinity" in the window heuristics.

#include <algorithm>
#include <cstddef>
#include <type_traits>
#include <utility>
#include <vector>

#include "moreau/error.hpp"
#include "moreau/extreal.hpp"

namespace moreau {

struct Axis {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 1;
    bool open_lo = true;
    bool open_hi = true;

    [[nodiscard]] double step() const noexcept { return n > 1 ? (hi - lo) / static_cast<double>(n - 1) : 0.0; }

    /// lo + i*h, always in this expression order so coordinates are bit-reproducible.
    [[nodiscard]] double coord(std::size_t i) const noexcept {
        const double h = step();
        return lo + static_cast<double>(i) * h;
    }

    bool operator==(const Axis&) const = default;
};

class Grid {
public:
    Grid() : Grid(Axis{}) {}

    explicit Grid(Axis a) : axes_{a} { validate(); }
    Grid(Axis a, Axis b) : axes_{a, b} { validate(); }

    static Grid line(double lo, double hi, std::size_t n) { return Grid(Axis{lo, hi, n, true, true}); }
    static Grid line(double lo, double hi, std::size_t n, bool open_lo, bool open_hi) {
        return Grid(Axis{lo, hi, n, open_lo, open_hi});
    }
    static Grid from_axes(const std::vector<Axis>& axes) {
        if (axes.size() == 1) return Grid(axes[0]);
        if (axes.size() == 2) return Grid(axes[0], axes[1]);
        throw error(errc::invalid_grid, "grids must have dimension 1 or 2");
    }

    [[nodiscard]] std::size_t dim() const noexcept { return axes_.size(); }
    [[nodiscard]] const Axis& axis(std::size_t k) const { return axes_.at(k); }
    [[nodiscard]] const std::vector<Axis>& axes() const noexcept { return axes_; }

    [[nodiscard]] std::size_t size() const noexcept {
        std::size_t s = 1;
        for (const auto& a : axes_) s *= a.n;
        return s;
    }

    /// Per-axis index of a flat (row-major) node index.
    [[nodiscard]] std::size_t index(std::size_t node, std::size_t k) const noexcept {
        if (axes_.size() == 1) return node;
        return k == 0 ? node / axes_[1].n : node % axes_[1].n;
    }

    [[nodiscard]] std::size_t flat(std::size_t i0, std::size_t i1 = 0) const noexcept {
        return axes_.size() == 1 ? i0 : i0 * axes_[1].n + i1;
    }

    [[nodiscard]] double coord(std::size_t node, std::size_t k = 0) const noexcept {
        return axes_[k].coord(index(node, k));
    }

    /// Nodes of the box (Chebyshev) ball of the given index radius, clipped to the grid.
    [[nodiscard]] std::vector<std::size_t> ball(std::size_t node, std::size_t radius) const {
        std::vector<std::size_t> out;
        auto range = [&](std::size_t k) {
            const std::size_t i = index(node, k);
            const std::size_t a = i >= radius ? i - radius : 0;
            const std::size_t b = std::min(axes_[k].n - 1, i + radius);
            return std::pair{a, b};
        };
        auto [a0, b0] = range(0);
        if (axes_.size() == 1) {
            for (std::size_t i = a0; i <= b0; ++i) out.push_back(i);
            return out;
        }
        auto [a1, b1] = range(1);
        for (std::size_t i = a0; i <= b0; ++i)
            for (std::size_t j = a1; j <= b1; ++j) out.push_back(flat(i, j));
        return out;
    }

    /// True when the node sits within max(radius, 1) index steps of an open side.
    [[nodiscard]] bool touches_open_edge(std::size_t node, std::size_t radius) const noexcept {
        const std::size_t r = std::max<std::size_t>(radius, 1);
        for (std::size_t k = 0; k < axes_.size(); ++k) {
            const Axis& a = axes_[k];
            if (a.n <= 1) continue;
            const std::size_t i = index(node, k);
            if (a.open_lo && i < r) return true;
            if (a.open_hi && i + r > a.n - 1) return true;
        }
        return false;
    }

    /// Mask of nodes that stay at least `margin` (fraction of the span) away from every open side.
    [[nodiscard]] std::vector<bool> inner_window(double margin) const {
        std::vector<bool> in(size(), true);
        for (std::size_t node = 0; node < size(); ++node) {
            for (std::size_t k = 0; k < axes_.size(); ++k) {
                const Axis& a = axes_[k];
                const double span = a.hi - a.lo;
                const double c = coord(node, k);
                if (a.open_lo && c < a.lo + margin * span) in[node] = false;
                if (a.open_hi && c > a.hi - margin * span) in[node] = false;
            }
        }
        return in;
    }

    bool operator==(const Grid&) const = default;

private:
    void validate() const {
        for (const auto& a : axes_) {
            if (a.n < 1) throw error(errc::invalid_grid, "an axis needs at least one node");
            if (!(a.lo <= a.hi)) throw error(errc::invalid_grid, "axis requires lo <= hi");
            if (a.lo == a.hi && a.n != 1) throw error(errc::invalid_grid, "lo == hi is only allowed with n == 1");
            if (a.n == 1 && a.lo != a.hi) throw error(errc::invalid_grid, "a one-node axis needs lo == hi");
        }
    }

    std::vector<Axis> axes_;
};

using NodeMask = std::vector<bool>;
using NodeSet = std::vector<std::size_t>;

inline NodeSet to_set(const NodeMask& m) {
    NodeSet s;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i]) s.push_back(i);
    return s;
}

inline NodeMask to_mask(const NodeSet& s, std::size_t n) {
    NodeMask m(n, false);
    for (auto i : s) {
        if (i >= n) throw error(errc::invalid_argument, "node index out of range");
        m[i] = true;
    }
    return m;
}

enum class Semicontinuity { plain, lsc, usc };

struct GridFn {
    Grid grid;
    std::vector<ExtReal> values;
    Semicontinuity tag = Semicontinuity::plain;

    GridFn() = default;
    GridFn(Grid g, std::vector<ExtReal> v, Semicontinuity t = Semicontinuity::plain)
        : grid(std::move(g)), values(std::move(v)), tag(t) {
        if (values.size() != grid.size())
            throw error(errc::grid_mismatch, "GridFn value count does not match the grid node count");
    }

    static GridFn constant(const Grid& g, ExtReal c) { return GridFn(g, std::vector<ExtReal>(g.size(), c)); }

    /// Samples fn at every node (1-D grids: fn(x); 2-D grids: fn(x0, x1)).
    template <typename F>
    static GridFn sample(const Grid& g, F&& fn) {
        std::vector<ExtReal> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            if constexpr (std::is_invocable_v<F, double>) {
                v[i] = ExtReal(fn(g.coord(i)));
            } else {
                v[i] = ExtReal(fn(g.coord(i, 0), g.coord(i, 1)));
            }
        }
        return GridFn(g, std::move(v));
    }

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    ExtReal operator[](std::size_t i) const { return values[i]; }
    ExtReal& operator[](std::size_t i) { return values[i]; }
};

/// Max-plus characteristic function: 0 on the set, -inf elsewhere.
inline GridFn indicator(const Grid& g, const NodeMask& a) {
    GridFn f = GridFn::constant(g, ExtReal::neg_inf());
    for (std::size_t i = 0; i < g.size(); ++i)
        if (a.at(i)) f[i] = ExtReal::zero();
    return f;
}

struct DomainMask {
    NodeMask ldom;  // g < +inf
    NodeMask udom;  // g > -inf
    NodeMask dom;   // ldom and udom
    NodeMask idom;  // dom and stencil-limsup < +inf
};

inline DomainMask domain_masks(const GridFn& g, std::size_t stencil_radius = 1) {
    const std::size_t n = g.size();
    DomainMask m{NodeMask(n), NodeMask(n), NodeMask(n), NodeMask(n)};
    for (std::size_t i = 0; i < n; ++i) {
        m.ldom[i] = !g[i].is_pos_inf();
        m.udom[i] = !g[i].is_neg_inf();
        m.dom[i] = m.ldom[i] && m.udom[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!m.dom[i]) continue;
        bool bounded = true;
        for (auto j : g.grid.ball(i, stencil_radius))
            if (g[j].is_pos_inf()) {
                bounded = false;
                break;
            }
        m.idom[i] = bounded;
    }
    return m;
}

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw error(errc::grid_mismatch, what);
}

}  // namespace moreau
