#include <catch2/catch_amalgamated.hpp>

#include "moreau/convergence.hpp"

using namespace moreau;
using Catch::Matchers::WithinAbs;

namespace {

const ExtReal P = ExtReal::pos_inf();

FormSequence gaussian_seq() {
    FormSequence s;
    s.n_list = {1e3, 1e4, 1e5, 1e6};
    s.generator = [](double n) { return QuasiLinearForm::gaussian(1.0 / n, 0.0, 1.0 / n); };
    s.epsilon = [](double n) { return 1.0 / n; };
    return s;
}

FormSequence constant_seq(const GridFn& f) {
    FormSequence s;
    s.n_list = {1, 10, 100, 1000};
    s.generator = [f](double) { return QuasiLinearForm::max_plus(f); };
    s.epsilon = [](double) { return 0.0; };
    return s;
}

}  // namespace

TEST_CASE("weak convergence of a constant sequence") {
    const Grid g = Grid::line(-1, 1, 21);
    const GridFn f = GridFn::sample(g, [](double y) { return y * y; });
    const auto F = QuasiLinearForm::max_plus(f);
    std::vector<GridFn> phis = {GridFn::sample(g, [](double y) { return std::min(y, 0.5); }),
                                GridFn::sample(g, [](double y) { return -std::abs(y); }),
                                GridFn::constant(g, ExtReal(3))};
    const auto r = weak_convergence_check(constant_seq(f), F, phis);
    CHECK(r.weak.flag == Flag::pass);
    CHECK(r.weak.worst_margin == 0.0);
    CHECK(r.weak.tested == 3);
    CHECK(r.rho_gate == Flag::pass);
    CHECK(r.implication_violations.empty());
}

TEST_CASE("an alternating sequence fails") {
    const Grid g = Grid::line(0, 1, 2);
    FormSequence s;
    s.n_list = {1, 2, 3, 4, 5, 6};
    s.generator = [g](double n) {
        return QuasiLinearForm::max_plus(int(n) % 2 ? GridFn(g, {ExtReal(0), P}) : GridFn(g, {P, ExtReal(0)}));
    };
    const auto F = QuasiLinearForm::max_plus(GridFn(g, {ExtReal(0), P}));
    const auto r = weak_convergence_check(s, F, {GridFn(g, {ExtReal(0), ExtReal(-1)})});
    CHECK(r.weak.flag == Flag::fail);
    CHECK(r.rho_gate == Flag::inconclusive);
}

TEST_CASE("Gaussian weak limit") {
    const Grid g = Grid::line(-2, 2, 81);
    const auto F = QuasiLinearForm::max_plus(GridFn::sample(g, [](double y) { return y * y / 2; }));
    std::vector<GridFn> phis = {GridFn::sample(g, [](double y) { return std::min(y, 1.0); }),
                                GridFn::sample(g, [](double y) { return 0.5 * y; })};
    const auto r = weak_convergence_check(gaussian_seq(), F, phis);
    CHECK(r.weak.flag == Flag::pass);
    CHECK(r.rho_gate == Flag::pass);
}

TEST_CASE("large deviation bounds for the Gaussian mean") {
    const Grid g = Grid::line(-2, 2, 41);
    const auto F = QuasiLinearForm::max_plus(GridFn::sample(g, [](double y) { return y * y / 2; }));
    NodeMask tail(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) tail[i] = g.coord(i) >= 1.0 - 1e-12;
    const std::vector<NamedSet> sets = {{"tail", tail}};
    ConvergenceOptions o;
    o.tol = 1e-3;
    const auto r = ldp_bounds_check(gaussian_seq(), F, g, sets, sets, sets, o);
    CHECK(r.open_liminf.flag == Flag::pass);
    CHECK(r.closed_limsup.flag == Flag::pass);
    REQUIRE(r.sets.size() == 3);
    CHECK_THAT(r.sets[0].rhs.value(), WithinAbs(-0.5, 1e-12));
    CHECK_THAT(r.sets[0].lhs_trend.value(), WithinAbs(-0.5, 1e-3));

    // a limit that puts zero cost everywhere overstates the closed-set bound
    const auto wrong = QuasiLinearForm::max_plus(GridFn::constant(g, ExtReal(0)));
    const auto w = ldp_bounds_check(gaussian_seq(), wrong, g, sets, sets, {}, o);
    CHECK(w.open_liminf.flag == Flag::fail);
    CHECK(w.closed_limsup.flag == Flag::pass);
    CHECK(w.open_liminf.witness == "tail");
}

TEST_CASE("interval sets and windows") {
    const Grid g = Grid::line(0, 1, 5);
    const auto all = default_interval_sets(g, 1000);
    CHECK(all.size() == 10);
    CHECK(all.front().id == "I0_1");
    CHECK(all.front().nodes == NodeMask{true, true, false, false, false});
    CHECK(default_interval_sets(g, 4).size() == 4);
    const auto inner = inside_window(g, all, 0.3);
    for (const auto& s : inner) CHECK_FALSE((s.nodes[0] || s.nodes[4]));
    CHECK_THROWS_AS(default_interval_sets(Grid(Axis{0, 1, 2, true, true}, Axis{0, 1, 2, true, true})), error);
}

TEST_CASE("asymptotic tightness") {
    const Grid g = Grid::line(-4, 4, 81);
    std::vector<NodeMask> windows;
    for (double k : {1.0, 2.0, 3.0}) {
        NodeMask m(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) m[i] = std::abs(g.coord(i)) <= k + 1e-12;
        windows.push_back(m);
    }
    const auto a = asymptotic_tightness_check(gaussian_seq(), g, windows);
    CHECK(a.evidence);
    CHECK(a.rho_bounded);
    CHECK(a.trace.size() == 3);
    CHECK_FALSE(asymptotic_tightness_check(constant_seq(GridFn::constant(g, ExtReal(0))), g, windows).evidence);
}

TEST_CASE("rate estimation") {
    const Grid g = Grid::line(-1, 1, 201);
    NodeSet all;
    for (std::size_t i = 0; i < g.size(); ++i) all.push_back(i);
    const double delta = 0.01;
    const GridFn r = estimate_rate(gaussian_seq(), g, all, delta);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double y = g.coord(i);
        CHECK(std::abs(r[i].value() - y * y / 2) <= std::max(delta * delta, 1e-2));
    }

    // a constant max-plus sequence returns the minimum of its density over the ball
    const GridFn f = GridFn::sample(g, [](double y) { return -y; });
    const GridFn c = estimate_rate(constant_seq(f), g, {10, 200}, delta);
    CHECK(c[10] == f[11]);
    CHECK(c[200] == f[200]);
    CHECK(c[0] == P);
    CHECK_THROWS_AS(estimate_rate(gaussian_seq(), g, all, 0.005), error);
}

TEST_CASE("margins table") {
    const Grid g = Grid::line(0, 1, 3);
    const auto F = QuasiLinearForm::max_plus(GridFn::constant(g, ExtReal(0)));
    const auto r = ldp_bounds_check(constant_seq(GridFn::constant(g, ExtReal(0))), F, g,
                                    {{"all", NodeMask(3, true)}}, {}, {});
    const std::string csv = margins_csv(r);
    CHECK(csv.rfind("set_id,kind,lhs_trend,rhs,margin,verdict\n", 0) == 0);
    CHECK(csv.find("all,open,0,0,0,PASS") != std::string::npos);
}
