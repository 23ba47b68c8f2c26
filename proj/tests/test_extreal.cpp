#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "moreau/grid.hpp"
#include "moreau/kernel.hpp"
#include "moreau/normal.hpp"
#include "moreau/trend.hpp"

using namespace moreau;
using Catch::Matchers::WithinAbs;

namespace {
const ExtReal P = ExtReal::pos_inf(), N = ExtReal::neg_inf();
}

TEST_CASE("oplus and otimes on small values") {
    CHECK(oplus(N, ExtReal(3)) == ExtReal(3));
    CHECK(otimes(N, P) == N);
    CHECK(otimes(P, N) == N);
    CHECK(otimes(ExtReal(2), ExtReal(3)) == ExtReal(5));
    CHECK(otimes(P, ExtReal(-7)) == P);
    CHECK(-P == N);
    CHECK(minus(ExtReal(1), P) == N);
    CHECK(minus(P, N) == P);
    CHECK_THROWS_AS(ExtReal(std::nan("")), std::invalid_argument);
}

TEST_CASE("ExtReal order and text form") {
    CHECK(N < ExtReal(-1e308));
    CHECK(ExtReal(1e308) < P);
    CHECK(to_string(P) == "+inf");
    CHECK(to_string(N) == "-inf");
    CHECK(parse_extreal("+inf") == P);
    CHECK(parse_extreal("-inf") == N);
    CHECK(parse_extreal("2.5") == ExtReal(2.5));
}

TEST_CASE("semiring laws on random extended reals") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> d(-6, 8);
    auto draw = [&] {
        const int v = d(rng);
        return v == 7 ? P : v == 8 ? N : ExtReal(v / 2.0);
    };
    for (int t = 0; t < 2000; ++t) {
        const ExtReal a = draw(), b = draw(), c = draw();
        CHECK(oplus(a, b) == oplus(b, a));
        CHECK(otimes(a, b) == otimes(b, a));
        CHECK(otimes(otimes(a, b), c) == otimes(a, otimes(b, c)));
        CHECK(otimes(a, oplus(b, c)) == oplus(otimes(a, b), otimes(a, c)));
        CHECK(oplus(a, N) == a);
        CHECK(otimes(a, ExtReal::zero()) == a);
        CHECK(otimes(a, N) == N);
    }
}

TEST_CASE("grid validation and coordinates") {
    CHECK_THROWS_AS(Grid::line(1, 0, 3), error);
    CHECK_THROWS_AS(Grid::line(0, 1, 1), error);
    CHECK_THROWS_AS(Grid::line(0, 1, 0), error);
    CHECK_NOTHROW(Grid::line(2, 2, 1));
    const Grid g = Grid::line(-1, 1, 5);
    CHECK(g.size() == 5);
    CHECK(g.coord(0) == -1.0);
    CHECK(g.coord(2) == 0.0);
    CHECK(g.coord(4) == 1.0);
    CHECK(Grid::line(-1, 1, 5).coord(3) == g.coord(3));
    CHECK(g.ball(0, 1) == std::vector<std::size_t>{0, 1});
    CHECK(g.ball(2, 1) == std::vector<std::size_t>{1, 2, 3});
    CHECK(g.ball(2, 0) == std::vector<std::size_t>{2});

    const Grid g2(Axis{0, 1, 3, true, true}, Axis{0, 2, 2, true, true});
    CHECK(g2.size() == 6);
    CHECK(g2.coord(g2.flat(2, 1), 0) == 1.0);
    CHECK(g2.coord(g2.flat(2, 1), 1) == 2.0);
    CHECK(g2.ball(g2.flat(1, 0), 1).size() == 6);
}

TEST_CASE("domain masks") {
    const Grid g = Grid::line(0, 4, 5);
    SECTION("zero function") {
        const auto m = domain_masks(GridFn::constant(g, ExtReal(0)));
        for (std::size_t i = 0; i < 5; ++i) CHECK((m.ldom[i] && m.udom[i] && m.dom[i] && m.idom[i]));
    }
    SECTION("mixed infinities") {
        const auto m = domain_masks(GridFn(g, {P, ExtReal(1), ExtReal(2), P, N}), 1);
        CHECK(m.ldom == NodeMask{false, true, true, false, true});
        CHECK(m.udom == NodeMask{true, true, true, true, false});
        CHECK(m.dom == NodeMask{false, true, true, false, false});
        CHECK(m.idom == NodeMask{false, false, false, false, false});
        const auto m0 = domain_masks(GridFn(g, {P, ExtReal(1), ExtReal(2), P, N}), 0);
        CHECK(m0.idom == m0.dom);
    }
}

TEST_CASE("kernel checks and transpose") {
    const Grid a = Grid::line(0, 1, 2);
    CHECK_THROWS_AS(Kernel::table(a, a, {{P, ExtReal(0)}, {ExtReal(0), ExtReal(0)}}), error);
    CHECK_THROWS_AS(Kernel::table(a, a, {{N, N}, {ExtReal(0), ExtReal(0)}}), error);
    CHECK_THROWS_AS(Kernel::table(a, a, {{N, ExtReal(0)}, {N, ExtReal(0)}}), error);
    const Kernel k = Kernel::table(a, Grid::line(0, 2, 3), {{ExtReal(1), ExtReal(2), N}, {N, ExtReal(4), ExtReal(5)}});
    const Kernel t = k.transpose();
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(t(j, i) == k(i, j));
    const Kernel b = Kernel::bilinear(Grid::line(-1, 1, 3), Grid::line(-2, 2, 5));
    CHECK(b(0, 0) == ExtReal(2));
    CHECK(b.transpose()(4, 2) == ExtReal(2));
}

TEST_CASE("normal tails") {
    CHECK_THAT(normal::log_sf(0.0), WithinAbs(std::log(0.5), 1e-15));
    CHECK_THAT(normal::log_sf(1.0), WithinAbs(std::log(0.15865525393145705), 1e-14));
    CHECK_THAT(normal::log_cdf(-3.0), WithinAbs(std::log(0.0013498980316300946), 1e-13));
    // continuity across the asymptotic switch
    CHECK_THAT(normal::log_sf(30.0 - 1e-9), WithinAbs(normal::log_sf(30.0 + 1e-9), 1e-6));
    CHECK_THAT(normal::log_sf(40.0), WithinAbs(-40.0 * 40.0 / 2 - std::log(40.0) - 0.5 * std::log(2 * normal::pi) +
                                                    std::log1p(-1.0 / 1600 + 3.0 / 1600 / 1600 - 15.0 / 1600 / 1600 / 1600),
                                                1e-9));
    CHECK(normal::log_sf(-50.0) == 0.0);
    CHECK_THAT(normal::log_prob_interval(-1, 1), WithinAbs(std::log(0.6826894921370859), 1e-13));
}

TEST_CASE("trend extrapolation") {
    SECTION("constant sequence is its own limit") {
        const auto t = extrapolate({1, 10, 100, 1000}, {ExtReal(0.3), ExtReal(0.3), ExtReal(0.3), ExtReal(0.3)});
        CHECK(t.limit == ExtReal(0.3));
        CHECK(t.residual == 0.0);
        CHECK(t.conclusive);
    }
    SECTION("exact 1/n and log n / n terms are removed") {
        std::vector<double> n = {10, 100, 1000, 10000, 100000};
        std::vector<ExtReal> v;
        for (double x : n) v.emplace_back(-0.5 + 2.0 / x + 3.0 * std::log(x) / x);
        const auto t = extrapolate(n, v);
        CHECK_THAT(t.limit.value(), WithinAbs(-0.5, 1e-9));
        CHECK(t.residual < 1e-9);
    }
    SECTION("short sequences are inconclusive") {
        const auto t = extrapolate({1, 2}, {ExtReal(1), ExtReal(3)});
        CHECK_FALSE(t.conclusive);
        CHECK(t.residual == 2.0);
    }
    SECTION("infinite tails") {
        const auto t = extrapolate({1, 2, 3}, {ExtReal(1), N, N});
        CHECK(t.limit == N);
        CHECK(t.limsup == ExtReal(1));
        const auto u = extrapolate({1, 2, 3}, {N, N, N});
        CHECK(u.limit == N);
        CHECK(u.residual == 0.0);
    }
}
