#pragma once

// Finite-prefix checks of weak convergence F_n -> F and of the large
// deviation bounds on open, closed and compact sets. Every verdict comes
// from a trend over the declared indices; limits are never certified.

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "moreau/parallel.hpp"
#include "moreau/quasilinear.hpp"
#include "moreau/trend.hpp"

namespace moreau {

struct FormSequence {
    std::function<QuasiLinearForm(double)> generator;
    std::vector<double> n_list;
    /// ε(n) when known; without it the ρ-gated equivalences stay INCONCLUSIVE.
    std::function<double(double)> epsilon;
    /// The generator may be called from several threads at once.
    bool thread_safe = true;
};

enum class Flag { pass, fail, inconclusive };

inline const char* to_string(Flag f) {
    switch (f) {
        case Flag::pass: return "PASS";
        case Flag::fail: return "FAIL";
        case Flag::inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

struct StatementResult {
    Flag flag = Flag::inconclusive;
    double worst_margin = std::numeric_limits<double>::infinity();
    std::string witness;
    std::size_t tested = 0;
};

enum class SetKind { open, closed, compact };

inline const char* to_string(SetKind k) {
    switch (k) {
        case SetKind::open: return "open";
        case SetKind::closed: return "closed";
        case SetKind::compact: return "compact";
    }
    return "open";
}

struct SetCheck {
    std::string set_id;
    SetKind kind = SetKind::open;
    ExtReal lhs_trend;  // liminf estimate for open sets, limsup estimate otherwise
    ExtReal rhs;        // F(A)
    double margin = 0;  // >= -tol passes
    Flag verdict = Flag::inconclusive;
};

struct ConvergenceReport {
    // (4) weak, (5) lsc-liminf, (6) usc-limsup, (7) open-liminf, (8) closed-limsup, (9) compact-limsup
    StatementResult weak, lsc_liminf, usc_limsup, open_liminf, closed_limsup, compact_limsup;
    std::vector<SetCheck> sets;
    /// ρ(F) <= lim ρ(F_n) = 0 gates the equivalences between the statements.
    Flag rho_gate = Flag::inconclusive;
    std::vector<std::string> implication_violations;
};

struct ConvergenceOptions {
    double tol = 1e-2;
    unsigned threads = 1;
};

namespace detail {

/// b - a with -inf - -inf = 0 and +inf - +inf = 0.
inline double gap(ExtReal b, ExtReal a) {
    if (a == b) return 0.0;
    if (b.is_pos_inf() || a.is_neg_inf()) return std::numeric_limits<double>::infinity();
    if (b.is_neg_inf() || a.is_pos_inf()) return -std::numeric_limits<double>::infinity();
    return b.value() - a.value();
}

inline void record(StatementResult& s, double margin, double tol, bool conclusive, const std::string& witness) {
    ++s.tested;
    if (margin < s.worst_margin) {
        s.worst_margin = margin;
        s.witness = witness;
    }
    const Flag f = margin < -tol ? Flag::fail : (conclusive ? Flag::pass : Flag::inconclusive);
    if (s.tested == 1) {
        s.flag = f;
    } else if (f == Flag::fail || s.flag == Flag::fail) {
        s.flag = Flag::fail;
    } else if (f == Flag::inconclusive) {
        s.flag = Flag::inconclusive;
    }
}

inline std::vector<QuasiLinearForm> materialize(const FormSequence& seq) {
    std::vector<QuasiLinearForm> forms;
    forms.reserve(seq.n_list.size());
    for (double n : seq.n_list) forms.push_back(seq.generator(n));
    return forms;
}

inline Flag rho_gate(const FormSequence& seq, const std::vector<QuasiLinearForm>& forms) {
    if (!seq.epsilon || seq.n_list.size() < 3) return Flag::inconclusive;
    std::vector<ExtReal> r;
    for (const auto& f : forms) r.emplace_back(f.rho_bound());
    const Trend t = extrapolate(seq.n_list, r);
    return t.limsup <= ExtReal(1e-9) ? Flag::pass : Flag::fail;
}

}  // namespace detail

inline ConvergenceReport weak_convergence_check(const FormSequence& seq, const QuasiLinearForm& F,
                                                const std::vector<GridFn>& test_functions,
                                                const ConvergenceOptions& opt = {}) {
    ConvergenceReport rep;
    const auto forms = detail::materialize(seq);
    rep.rho_gate = detail::rho_gate(seq, forms);
    std::vector<Trend> trends(test_functions.size());
    std::vector<ExtReal> targets(test_functions.size());
    parallel_for(test_functions.size(), seq.thread_safe ? opt.threads : 1, [&](std::size_t k) {
        std::vector<ExtReal> v;
        for (const auto& f : forms) v.push_back(evaluate(f, test_functions[k]));
        trends[k] = extrapolate(seq.n_list, v);
        targets[k] = evaluate(F, test_functions[k]);
    });
    for (std::size_t k = 0; k < test_functions.size(); ++k) {
        const std::string w = "phi#" + std::to_string(k);
        const bool c = trends[k].conclusive;
        const double m5 = detail::gap(trends[k].liminf, targets[k]);
        const double m6 = detail::gap(targets[k], trends[k].limsup);
        detail::record(rep.lsc_liminf, m5, opt.tol, c, w);
        detail::record(rep.usc_limsup, m6, opt.tol, c, w);
        detail::record(rep.weak, std::min(m5, m6), opt.tol, c, w);
    }
    if (rep.lsc_liminf.flag == Flag::pass && rep.usc_limsup.flag == Flag::pass && rep.weak.flag != Flag::pass)
        rep.implication_violations.emplace_back("(5) and (6) pass but (4) does not");
    return rep;
}

struct NamedSet {
    std::string id;
    NodeMask nodes;
};

inline ConvergenceReport ldp_bounds_check(const FormSequence& seq, const QuasiLinearForm& F, const Grid& grid,
                                          const std::vector<NamedSet>& open_sets,
                                          const std::vector<NamedSet>& closed_sets,
                                          const std::vector<NamedSet>& compact_sets,
                                          const ConvergenceOptions& opt = {}) {
    ConvergenceReport rep;
    const auto forms = detail::materialize(seq);
    rep.rho_gate = detail::rho_gate(seq, forms);

    struct Job {
        const NamedSet* set;
        SetKind kind;
    };
    std::vector<Job> jobs;
    for (const auto& s : open_sets) jobs.push_back({&s, SetKind::open});
    for (const auto& s : closed_sets) jobs.push_back({&s, SetKind::closed});
    for (const auto& s : compact_sets) jobs.push_back({&s, SetKind::compact});

    rep.sets.resize(jobs.size());
    std::vector<bool> conclusive(jobs.size());
    parallel_for(jobs.size(), seq.thread_safe ? opt.threads : 1, [&](std::size_t k) {
        const Job& j = jobs[k];
        std::vector<ExtReal> v;
        for (const auto& f : forms) v.push_back(eval_on_set(f, grid, j.set->nodes));
        const Trend t = extrapolate(seq.n_list, v);
        SetCheck& c = rep.sets[k];
        c.set_id = j.set->id;
        c.kind = j.kind;
        c.rhs = eval_on_set(F, grid, j.set->nodes);
        if (j.kind == SetKind::open) {
            c.lhs_trend = t.liminf;
            c.margin = detail::gap(t.liminf, c.rhs);
        } else {
            c.lhs_trend = t.limsup;
            c.margin = detail::gap(c.rhs, t.limsup);
        }
        conclusive[k] = t.conclusive;
        c.verdict = c.margin < -opt.tol ? Flag::fail : (t.conclusive ? Flag::pass : Flag::inconclusive);
    });
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        const SetCheck& c = rep.sets[k];
        StatementResult& s = c.kind == SetKind::open     ? rep.open_liminf
                             : c.kind == SetKind::closed ? rep.closed_limsup
                                                         : rep.compact_limsup;
        detail::record(s, c.margin, opt.tol, conclusive[k], c.set_id);
    }

    // closed-set bounds carry over to the compact sets among them
    for (const auto& a : rep.sets) {
        if (a.kind != SetKind::closed || a.verdict != Flag::pass) continue;
        for (const auto& b : rep.sets)
            if (b.kind == SetKind::compact && b.set_id == a.set_id && b.verdict == Flag::fail)
                rep.implication_violations.push_back("closed bound passes but compact bound fails on " + a.set_id);
    }
    return rep;
}

/// Sub-intervals [y_i, y_j], i < j, of a 1-D grid, evenly subsampled down to max_sets.
inline std::vector<NamedSet> default_interval_sets(const Grid& grid, std::size_t max_sets = 200) {
    if (grid.dim() != 1) throw error(errc::invalid_argument, "default_interval_sets: 1-D grids only");
    const std::size_t n = grid.size();
    std::vector<std::pair<std::size_t, std::size_t>> all;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) all.emplace_back(i, j);
    std::vector<NamedSet> out;
    const std::size_t total = all.size();
    const std::size_t take = std::min(max_sets, total);
    for (std::size_t k = 0; k < take; ++k) {
        const auto [i, j] = all[take == total ? k : (k * total) / take];
        NodeMask m(n, false);
        for (std::size_t q = i; q <= j; ++q) m[q] = true;
        out.push_back({"I" + std::to_string(i) + "_" + std::to_string(j), std::move(m)});
    }
    return out;
}

/// The sets of `sets` lying inside the inner window of the grid.
inline std::vector<NamedSet> inside_window(const Grid& grid, const std::vector<NamedSet>& sets, double margin) {
    const NodeMask inner = grid.inner_window(margin);
    std::vector<NamedSet> out;
    for (const auto& s : sets) {
        bool ok = true;
        for (std::size_t i = 0; i < s.nodes.size(); ++i)
            if (s.nodes[i] && !inner[i]) ok = false;
        if (ok) out.push_back(s);
    }
    return out;
}

struct AsymptoticTightness {
    bool evidence = false;
    std::vector<ExtReal> trace;  // limsup trend of F_n(K^c) per window
    bool rho_bounded = false;
};

inline AsymptoticTightness asymptotic_tightness_check(const FormSequence& seq, const Grid& grid,
                                                      const std::vector<NodeMask>& windows, double floor = -1e6) {
    AsymptoticTightness a;
    const auto forms = detail::materialize(seq);
    double rho = -std::numeric_limits<double>::infinity();
    for (const auto& f : forms) rho = std::max(rho, f.rho_bound());
    a.rho_bounded = std::isfinite(rho) || rho == -std::numeric_limits<double>::infinity();
    for (const auto& w : windows) {
        NodeMask comp(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) comp[i] = !w[i];
        std::vector<ExtReal> v;
        for (const auto& f : forms) v.push_back(eval_on_set(f, grid, comp));
        a.trace.push_back(extrapolate(seq.n_list, v).limsup);
    }
    a.evidence = a.rho_bounded && trace_shows_tightness(a.trace, floor);
    return a;
}

/// f̂(y) = -lim F_n(ball(y, δ)) on the requested nodes (+inf elsewhere).
/// Off by at most the oscillation of the true rate on the ball.
inline GridFn estimate_rate(const FormSequence& seq, const Grid& grid, const NodeSet& y_nodes, double delta,
                            unsigned threads = 1) {
    if (grid.dim() != 1) throw error(errc::invalid_argument, "estimate_rate: 1-D grids only");
    if (grid.size() > 1 && delta < grid.axis(0).step() * (1 - 1e-12))
        throw error(errc::invalid_argument, "estimate_rate: delta must be at least the grid spacing");
    const auto forms = detail::materialize(seq);
    GridFn out = GridFn::constant(grid, ExtReal::pos_inf());
    parallel_for(y_nodes.size(), seq.thread_safe ? threads : 1, [&](std::size_t k) {
        const std::size_t y = y_nodes[k];
        NodeMask ball(grid.size(), false);
        const double c = grid.coord(y);
        for (std::size_t i = 0; i < grid.size(); ++i)
            ball[i] = std::abs(grid.coord(i) - c) <= delta * (1 + 1e-12);
        std::vector<ExtReal> v;
        for (const auto& f : forms) v.push_back(eval_on_set(f, grid, ball));
        out[y] = -extrapolate(seq.n_list, v).limit;
    });
    return out;
}

/// CSV of per-set margins.
inline std::string margins_csv(const ConvergenceReport& rep) {
    std::string s = "set_id,kind,lhs_trend,rhs,margin,verdict\n";
    char buf[64];
    for (const auto& c : rep.sets) {
        std::snprintf(buf, sizeof buf, "%.17g", c.margin);
        s += c.set_id + "," + to_string(c.kind) + "," + to_string(c.lhs_trend) + "," + to_string(c.rhs) + "," +
             (std::isinf(c.margin) ? (c.margin > 0 ? "+inf" : "-inf") : std::string(buf)) + "," +
             to_string(c.verdict) + "\n";
    }
    return s;
}

}  // namespace moreau
