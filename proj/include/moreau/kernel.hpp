#pragma once

// Coupling b(x, y) between an X-grid and a Y-grid.
//
// Entries lie in R u {-inf}; +inf is rejected. Every row and every column
// must contain a finite entry. The bilinear kernel b(x, y) = <x, y> is
// evaluated on the fly; tables are shared between a kernel and its
// transpose, so transposing is O(1).

#include <memory>
#include <vector>

#include "moreau/grid.hpp"

namespace moreau {

class Kernel {
public:
    enum class Kind { bilinear, table };

    static Kernel bilinear(Grid x_grid, Grid y_grid) {
        if (x_grid.dim() != y_grid.dim())
            throw error(errc::invalid_kernel, "bilinear kernel needs grids of equal dimension");
        return Kernel(std::move(x_grid), std::move(y_grid), Kind::bilinear, nullptr, false);
    }

    /// rows[i][j] = b(x_i, y_j).
    static Kernel table(Grid x_grid, Grid y_grid, const std::vector<std::vector<ExtReal>>& rows) {
        const std::size_t nx = x_grid.size(), ny = y_grid.size();
        if (rows.size() != nx) throw error(errc::invalid_kernel, "table needs one row per x-node");
        auto t = std::make_shared<std::vector<ExtReal>>();
        t->reserve(nx * ny);
        for (const auto& row : rows) {
            if (row.size() != ny) throw error(errc::invalid_kernel, "table row length must equal the y-node count");
            t->insert(t->end(), row.begin(), row.end());
        }
        Kernel k(std::move(x_grid), std::move(y_grid), Kind::table, std::move(t), false);
        k.validate();
        return k;
    }

    [[nodiscard]] const Grid& x_grid() const noexcept { return x_; }
    [[nodiscard]] const Grid& y_grid() const noexcept { return y_; }
    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] bool is_bilinear() const noexcept { return kind_ == Kind::bilinear; }

    [[nodiscard]] ExtReal operator()(std::size_t ix, std::size_t iy) const {
        if (kind_ == Kind::bilinear) {
            if (x_.dim() == 1) return ExtReal(x_.coord(ix) * y_.coord(iy));
            double s = 0.0;
            for (std::size_t k = 0; k < x_.dim(); ++k) s += x_.coord(ix, k) * y_.coord(iy, k);
            return ExtReal(s);
        }
        return transposed_ ? (*table_)[iy * x_.size() + ix] : (*table_)[ix * y_.size() + iy];
    }

    /// The kernel b-check(y, x) = b(x, y) of the dual conjugacy.
    [[nodiscard]] Kernel transpose() const { return Kernel(y_, x_, kind_, table_, !transposed_); }

    /// b(x, .) as a function on the Y-grid.
    [[nodiscard]] GridFn row(std::size_t ix) const {
        std::vector<ExtReal> v(y_.size());
        for (std::size_t j = 0; j < y_.size(); ++j) v[j] = (*this)(ix, j);
        return GridFn(y_, std::move(v));
    }

private:
    Kernel(Grid x, Grid y, Kind kind, std::shared_ptr<const std::vector<ExtReal>> t, bool transposed)
        : x_(std::move(x)), y_(std::move(y)), kind_(kind), table_(std::move(t)), transposed_(transposed) {}

    void validate() const {
        const std::size_t nx = x_.size(), ny = y_.size();
        std::vector<bool> col_ok(ny, false);
        for (std::size_t i = 0; i < nx; ++i) {
            bool row_ok = false;
            for (std::size_t j = 0; j < ny; ++j) {
                const ExtReal b = (*this)(i, j);
                if (b.is_pos_inf()) throw error(errc::invalid_kernel, "kernel entries must be < +inf");
                if (b.is_finite()) {
                    row_ok = true;
                    col_ok[j] = true;
                }
            }
            if (!row_ok) throw error(errc::invalid_kernel, "every x-node needs a finite kernel entry");
        }
        for (std::size_t j = 0; j < ny; ++j)
            if (!col_ok[j]) throw error(errc::invalid_kernel, "every y-node needs a finite kernel entry");
    }

    Grid x_;
    Grid y_;
    Kind kind_;
    std::shared_ptr<const std::vector<ExtReal>> table_;
    bool transposed_;
};

}  // namespace moreau
