#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "moreau/conjugacy.hpp"

using namespace moreau;

namespace {

const ExtReal P = ExtReal::pos_inf(), N = ExtReal::neg_inf();

Kernel identity2() {
    const Grid a = Grid::line(0, 1, 2);
    return Kernel::table(a, a, {{ExtReal(0), N}, {N, ExtReal(0)}});
}

Kernel zeros2() {
    const Grid a = Grid::line(0, 1, 2);
    return Kernel::table(a, a, {{ExtReal(0), ExtReal(0)}, {ExtReal(0), ExtReal(0)}});
}

}  // namespace

TEST_CASE("brute-force conjugate on small kernels") {
    const Kernel id = identity2();
    const GridFn f(id.y_grid(), {ExtReal(2), ExtReal(5)});
    CHECK(conjugate(f, id).values == std::vector<ExtReal>{ExtReal(-2), ExtReal(-5)});

    const Grid g3 = Grid::line(-1, 1, 3);
    const Kernel b = Kernel::bilinear(g3, g3);
    const GridFn q = GridFn::sample(g3, [](double y) { return y * y / 2; });
    CHECK(conjugate(q, b).values == std::vector<ExtReal>{ExtReal(0.5), ExtReal(0), ExtReal(0.5)});

    CHECK(conjugate(GridFn::constant(g3, P), b).values == std::vector<ExtReal>(3, N));
}

TEST_CASE("argmax sets") {
    const Kernel z = zeros2();
    const auto r = conjugate_with_argmax(GridFn::constant(z.y_grid(), ExtReal(0)), z);
    CHECK(r.argmax[0] == NodeSet{0, 1});
    CHECK(r.argmax[1] == NodeSet{0, 1});
}

TEST_CASE("dual conjugate uses the transposed kernel") {
    const Grid xg = Grid::line(0, 1, 2), yg = Grid::line(0, 2, 3);
    const Kernel k = Kernel::table(xg, yg, {{ExtReal(1), ExtReal(2), N}, {N, ExtReal(4), ExtReal(5)}});
    const GridFn g(xg, {ExtReal(1), ExtReal(3)});
    const GridFn d = dual_conjugate(g, k);
    CHECK(d.values == std::vector<ExtReal>{ExtReal(0), ExtReal(1), ExtReal(2)});
    CHECK(conjugate(g, k.transpose()).values == d.values);
}

TEST_CASE("legendre_fast examples") {
    const Grid g = Grid::line(-1, 1, 101);
    const GridFn q = GridFn::sample(g, [](double y) { return y * y / 2; });
    CHECK(legendre_fast(q, g).values == conjugate(q, Kernel::bilinear(g, g)).values);

    const Grid w = Grid::line(-2, 2, 41);
    const GridFn a = GridFn::sample(w, [](double y) { return std::abs(y); });
    const GridFn r = legendre_fast(a, w);
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double x = w.coord(i);
        if (std::abs(x) <= 1.0) CHECK(r[i] == ExtReal(0));
    }
    CHECK(r[40] == ExtReal(2));

    const Grid zero(Axis{0, 0, 1, false, false});
    CHECK(legendre_fast(GridFn::constant(g, ExtReal(0)), zero)[0] == ExtReal(0));

    GridFn m = q;
    m[7] = N;
    CHECK(legendre_fast(m, g).values == std::vector<ExtReal>(g.size(), P));
    CHECK_THROWS_AS(legendre_fast(GridFn::constant(g, P), g), error);
}

TEST_CASE("legendre_fast matches brute force on random inputs") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int t = 0; t < 40; ++t) {
        const std::size_t ny = 2 + t * 7, nx = 3 + t * 5;
        const Grid yg = Grid::line(-1.5, 2.5, ny), xg = Grid::line(-3, 1, nx);
        GridFn f(yg, std::vector<ExtReal>(ny));
        for (std::size_t j = 0; j < ny; ++j) f[j] = t % 3 == 0 && j % 4 == 1 ? P : ExtReal(u(rng));
        CHECK(legendre_fast(f, xg).values == conjugate(f, Kernel::bilinear(xg, yg)).values);
    }
}

TEST_CASE("Galois inequalities on random tables") {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> d(-8, 10);
    auto draw = [&](bool allow_pos) {
        const int v = d(rng);
        if (v == 10) return N;
        if (v == 9) return allow_pos ? P : ExtReal(0);
        return ExtReal(v / 4.0);
    };
    for (int t = 0; t < 50; ++t) {
        const std::size_t nx = 1 + t % 7, ny = 1 + (t * 3) % 8;
        const Grid xg = Grid::line(0, double(nx - 1), nx), yg = Grid::line(0, double(ny - 1), ny);
        std::vector<std::vector<ExtReal>> rows(nx, std::vector<ExtReal>(ny));
        for (auto& r : rows)
            for (auto& b : r) b = draw(false);
        for (std::size_t i = 0; i < std::max(nx, ny); ++i) rows[i % nx][i % ny] = ExtReal(0);
        const Kernel k = Kernel::table(xg, yg, rows);
        GridFn g(xg, std::vector<ExtReal>(nx));
        for (std::size_t i = 0; i < nx; ++i) g[i] = draw(true);
        const GridFn d1 = dual_conjugate(g, k), back = conjugate(d1, k);
        for (std::size_t i = 0; i < nx; ++i) CHECK(back[i] <= g[i]);
        CHECK(dual_conjugate(back, k).values == d1.values);
    }
}

TEST_CASE("subdifferential examples") {
    const Grid g3 = Grid::line(-1, 1, 3);
    const auto sd = subdifferential_map(GridFn::sample(g3, [](double x) { return x * x / 2; }), Kernel::bilinear(g3, g3));
    CHECK(sd.at_x[1] == NodeSet{1});
    for (std::size_t j = 0; j < 3; ++j)
        for (auto i : sd.inverse[j]) CHECK(std::find(sd.at_x[i].begin(), sd.at_x[i].end(), j) != sd.at_x[i].end());

    const auto id = subdifferential_map(GridFn(Grid::line(0, 1, 2), {ExtReal(3), ExtReal(-1)}), identity2());
    CHECK(id.at_x[0] == NodeSet{0});
    CHECK(id.at_x[1] == NodeSet{1});
    CHECK(id.inverse[0] == NodeSet{0});

    const auto z = subdifferential_map(GridFn::constant(Grid::line(0, 1, 2), ExtReal(0)), zeros2());
    CHECK(z.at_x[0] == NodeSet{0, 1});
    CHECK(z.inverse[1] == NodeSet{0, 1});
}

TEST_CASE("coercivity diagnostics") {
    const Kernel k = Kernel::bilinear(Grid::line(0.1, 1, 10, false, true), Grid::line(0, 2, 41, false, true));
    const auto r = coercivity_report(k);
    CHECK(r.coercive == Evidence::evidence);
    CHECK(r.strongly_coercive == Evidence::evidence);
    CHECK(r.upper_coercive == Evidence::evidence);

    const Grid y = Grid::line(-1, 1, 21);
    std::vector<std::vector<ExtReal>> rows(5, std::vector<ExtReal>(21, ExtReal(0)));
    CHECK(coercivity_report(Kernel::table(Grid::line(0, 1, 5), y, rows)).coercive == Evidence::violation);

    const Grid x0(Axis{0, 0, 1, false, false});
    CHECK(coercivity_report(Kernel::bilinear(x0, Grid(Axis{-1, 1, 21, true, true}))).coercive == Evidence::violation);
}

TEST_CASE("F_c membership evidence") {
    const Grid y = Grid::line(-5, 5, 101), x = Grid::line(-1, 1, 5);
    const Kernel k = Kernel::bilinear(x, y);
    CHECK(fc_membership(GridFn::sample(y, [](double v) { return v * v; }), k).overall == Evidence::evidence);
    CHECK(fc_membership(GridFn::constant(y, ExtReal(0)), k).overall == Evidence::violation);
    CHECK(fc_membership(GridFn::constant(y, P), k).overall == Evidence::evidence);
}
