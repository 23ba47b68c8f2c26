#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "moreau/normal.hpp"
#include "moreau/quasilinear.hpp"

using namespace moreau;
using Catch::Matchers::WithinAbs;

namespace {
const ExtReal P = ExtReal::pos_inf(), N = ExtReal::neg_inf();
const Grid two = Grid::line(0, 1, 2);
}  // namespace

TEST_CASE("max-plus and log-integral values") {
    const Grid g3 = Grid::line(0, 2, 3);
    const auto mp = QuasiLinearForm::max_plus(GridFn::constant(g3, ExtReal(0)));
    CHECK(evaluate(mp, GridFn(g3, {ExtReal(1), ExtReal(-2), ExtReal(3)})) == ExtReal(3));

    const auto li = QuasiLinearForm::log_integral(0.5, two, {0.5, 0.5});
    CHECK_THAT(evaluate(li, GridFn::constant(two, ExtReal(0))).value(), WithinAbs(0.0, 1e-15));
    CHECK_THAT(evaluate(li, GridFn(two, {ExtReal(0), N})).value(), WithinAbs(0.5 * std::log(0.5), 1e-15));
    CHECK_THAT(eval_on_set(li, two, {true, false}).value(), WithinAbs(-0.34657359027997264, 1e-12));
    CHECK(eval_on_set(li, two, {false, false}) == N);
    CHECK(eval_on_set(mp, g3, {true, true, true}) == ExtReal(0));
    CHECK(evaluate(li, GridFn(two, {P, ExtReal(0)})) == P);
}

TEST_CASE("additive homogeneity and isotonicity") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> d(-16, 16);
    const Grid g = Grid::line(-1, 1, 9);
    std::vector<double> w(9, 1.0);
    const std::vector<QuasiLinearForm> forms = {
        QuasiLinearForm::max_plus(GridFn::sample(g, [](double y) { return y * y; })),
        QuasiLinearForm::log_integral(0.25, g, w),
        QuasiLinearForm::empirical(0.5, {-0.9, 0.1, 0.2, 0.7}),
        QuasiLinearForm::gaussian(0.1, 0.2, 0.1),
    };
    for (const auto& F : forms) {
        for (int t = 0; t < 50; ++t) {
            GridFn phi(g, std::vector<ExtReal>(9));
            for (std::size_t i = 0; i < 9; ++i) phi[i] = ExtReal(d(rng) / 8.0);
            const double lam = d(rng) / 4.0;
            GridFn shifted = phi, bigger = phi;
            for (std::size_t i = 0; i < 9; ++i) {
                shifted[i] = otimes(phi[i], ExtReal(lam));
                bigger[i] = otimes(phi[i], ExtReal(std::abs(d(rng)) / 8.0));
            }
            CHECK_THAT(evaluate(F, shifted).value(), WithinAbs(lam + evaluate(F, phi).value(), 1e-12));
            CHECK(evaluate(F, phi) <= evaluate(F, bigger));
        }
    }
}

TEST_CASE("rho estimates") {
    const Grid g = Grid::line(0, 4, 5);
    const auto mp = QuasiLinearForm::max_plus(GridFn::sample(g, [](double y) { return y; }));
    CHECK(rho_estimate(mp, g, 300, 1).rho_hat <= 0.0);
    CHECK(mp.rho_bound() == 0.0);

    const auto li = QuasiLinearForm::log_integral(1.0, two, {0.5, 0.5});
    const ExtReal both = evaluate(li, GridFn::constant(two, ExtReal(0)));
    const ExtReal one = max(evaluate(li, GridFn(two, {ExtReal(0), N})), evaluate(li, GridFn(two, {N, ExtReal(0)})));
    CHECK_THAT(minus(both, one).value(), WithinAbs(std::log(2.0), 1e-15));
    CHECK(rho_estimate(li, two, 500, 2).rho_hat <= std::log(2.0) + 1e-12);
    CHECK_THAT(li.rho_bound(), WithinAbs(std::log(2.0), 1e-15));

    const auto fam = QuasiLinearForm::sup_family({li, QuasiLinearForm::log_integral(0.25, two, {1, 3})});
    CHECK_THAT(fam.rho_bound(), WithinAbs(std::log(2.0), 1e-15));
    const auto r = rho_estimate(QuasiLinearForm::log_integral(0.3, g, {1, 2, 3, 4, 5}), g, 1000, 3);
    CHECK(r.rho_hat <= 0.3 * std::log(2.0) + 1e-12);
    CHECK(r.isotone_violations == 0);
    CHECK(r.max_homogeneity_error <= 1e-12);
}

TEST_CASE("density recovery") {
    const Grid g3 = Grid::line(0, 2, 3);
    CHECK(density_of(QuasiLinearForm::max_plus(GridFn::constant(g3, ExtReal(0))), g3).values ==
          std::vector<ExtReal>(3, ExtReal(0)));
    const auto f = QuasiLinearForm::max_plus(GridFn(two, {ExtReal(1), ExtReal(2)}));
    CHECK(density_of(f, two).values == std::vector<ExtReal>{ExtReal(1), ExtReal(2)});
    try {
        density_of(QuasiLinearForm::log_integral(0.5, two, {1, 1}), two);
        FAIL("expected not_max_plus_linear");
    } catch (const error& e) {
        CHECK(e.code() == errc::not_max_plus_linear);
    }
}

TEST_CASE("tightness traces") {
    const Grid g = Grid::line(-5, 5, 101);
    std::vector<NodeMask> windows;
    for (double k : {1.0, 2.0, 3.0, 4.0}) {
        NodeMask m(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) m[i] = std::abs(g.coord(i)) <= k + 1e-12;
        windows.push_back(m);
    }
    const auto inf_compact = QuasiLinearForm::max_plus(GridFn::sample(g, [](double y) { return y * y; }));
    CHECK(tightness_check(inf_compact, g, windows).tight_evidence);
    const auto flat = QuasiLinearForm::max_plus(GridFn::constant(g, ExtReal(0)));
    const auto t = tightness_check(flat, g, windows);
    CHECK_FALSE(t.tight_evidence);
    CHECK(t.trace == std::vector<ExtReal>(4, ExtReal(0)));
    std::vector<double> w(g.size(), 0.0);
    w[50] = 1.0;
    CHECK(tightness_check(QuasiLinearForm::log_integral(0.1, g, w), g, windows).trace.back() == N);
    CHECK(trace_shows_tightness({ExtReal(-1), ExtReal(-4), ExtReal(-9)}, -1e6));
    CHECK_FALSE(trace_shows_tightness({ExtReal(-1), ExtReal(-4), ExtReal(-4.01)}, -1e6));
}

TEST_CASE("Gaussian closed forms") {
    const double eps = 0.01;
    const auto G = QuasiLinearForm::gaussian(eps, 0.0, eps);
    for (double x : {-1.5, -0.04, 0.0, 0.3, 2.0}) CHECK(*evaluate_linear(G, x) == ExtReal(x * x / 2));

    // F(1_[c,∞)) = ε log Φ̄(c / s)
    const Grid g = Grid::line(-2, 2, 401);
    NodeMask tail(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) tail[i] = g.coord(i) >= 1.0 - 1e-12;
    const auto H = QuasiLinearForm::gaussian(eps, 0.0, 0.04);
    CHECK_THAT(eval_on_set(H, g, tail).value(), WithinAbs(eps * normal::log_sf(1.0 / 0.2), 1e-12));

    // truncated moment against quadrature
    const auto T = QuasiLinearForm::gaussian(0.5, 0.1, 0.3, -0.2);
    const double slope = 0.7, s = std::sqrt(0.3);
    double acc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = -10 + 20.0 * (i + 0.5) / n, y = 0.1 + s * z;
        acc += std::exp(slope * std::max(y, -0.2) / 0.5) * std::exp(-z * z / 2) / std::sqrt(2 * normal::pi) * (20.0 / n);
    }
    CHECK_THAT(evaluate_linear(T, slope)->value(), WithinAbs(0.5 * std::log(acc), 1e-9));
}

TEST_CASE("Gaussian quadratic family") {
    // mean c0 + c1 ξ + c2 ξ², variance v ξ²: the sup over ξ of slope·mean + slope²·var/(2ε)
    const auto Q = QuasiLinearForm::gaussian_quadratic(1.0, {0.05, 0.05, -0.02}, 0.04, {});
    const double x = 0.5;
    const double A = x * -0.02 + 0.5 * x * x * 0.04 / 1.0, B = x * 0.05, C = x * 0.05;
    CHECK_THAT(evaluate_linear(Q, x)->value(), WithinAbs(C - B * B / (4 * A), 1e-15));
    CHECK(evaluate_linear(Q, 0.0) == ExtReal(0));
    CHECK(evaluate_linear(Q, 3.0) == P);
    CHECK_THROWS_AS(truncate_form(Q, 0.0), error);
}

TEST_CASE("truncation on samples") {
    const std::vector<double> s = {-1.0, -0.2, 0.3, 0.8, 1.4};
    const auto F = QuasiLinearForm::empirical(0.2, s);
    const Grid g = Grid::line(-2, 2, 81);

    const auto below = truncate_form(F, -5.0);
    for (double x : {-1.0, 0.0, 0.5, 2.0}) CHECK(*evaluate_linear(below, x) == *evaluate_linear(F, x));

    const double a = -0.5, c = 0.5;
    NodeMask up(g.size()), down(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        up[i] = g.coord(i) >= c - 1e-12;
        down[i] = g.coord(i) <= c + 1e-12;
    }
    const auto G = truncate_form(F, a);
    CHECK(eval_on_set(G, g, up) == eval_on_set(F, g, up));
    CHECK(eval_on_set(G, g, down) == eval_on_set(F, g, down));

    // max(F(b), x a) <= G(b) <= max(F(b), x a) + ε log 2 for x >= 0
    for (double x : {0.0, 0.1, 0.5, 1.0, 3.0}) {
        const double f = evaluate_linear(F, x)->value(), gv = evaluate_linear(G, x)->value();
        CHECK(gv >= std::max(f, x * a) - 1e-15);
        CHECK(gv <= std::max(f, x * a) + 0.2 * std::log(2.0) + 1e-15);
    }
    CHECK_THROWS_AS(truncate_form(QuasiLinearForm::log_integral(0.5, two, {1, 1}), 0.0), error);
}

TEST_CASE("form validation") {
    CHECK_THROWS_AS(QuasiLinearForm::log_integral(0.0, two, {1, 1}), error);
    CHECK_THROWS_AS(QuasiLinearForm::log_integral(0.5, two, {0, 0}), error);
    CHECK_THROWS_AS(QuasiLinearForm::log_integral(0.5, two, {1}), error);
    CHECK_THROWS_AS(QuasiLinearForm::empirical(0.5, {}), error);
    CHECK_THROWS_AS(QuasiLinearForm::gaussian(0.5, 0.0, -1.0), error);
}
