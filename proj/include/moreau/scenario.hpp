#pragma once

// Scenario files: a JSON object with a `kind` and a payload of the same name.
// run() validates, computes, writes artifacts and returns the exit status
// (0 complete, 2 failed checks, 3 invalid input).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "moreau/io.hpp"
#include "moreau/merton.hpp"

namespace moreau::scenario {

using io::json;
using io::schema_error;

inline constexpr int exit_ok = 0;
inline constexpr int exit_fail = 2;
inline constexpr int exit_invalid = 3;

struct RunOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool summary = false;
    std::string expected_kind;  // subcommand name; empty accepts any kind
};

struct Artifacts {
    std::vector<std::pair<std::string, std::string>> files;  // (name, contents)
    std::string digest;
    int status = exit_ok;
};

namespace detail {

inline std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline std::string output_name(const json& outputs, const char* key, const std::string& fallback) {
    if (outputs.is_null() || !outputs.contains(key)) return fallback;
    return io::get_string(outputs[key], std::string("outputs.") + key);
}

inline std::vector<double> get_list(const json& j, const std::string& where) {
    auto v = io::get_numbers(j, where);
    if (v.empty()) throw schema_error(where, "must not be empty");
    for (double x : v)
        if (!(x > 0.0)) throw schema_error(where, "entries must be positive");
    return v;
}

inline merton::Params merton_params(const json& j, const std::string& where) {
    merton::Params p;
    p.r = io::get_number(io::need(j, where, "r"), where + ".r");
    p.alpha = io::get_number(io::need(j, where, "alpha"), where + ".alpha");
    p.sigma = io::get_number(io::need(j, where, "sigma"), where + ".sigma");
    if (j.contains("w0")) p.W0 = io::get_number(j["w0"], where + ".w0");
    try {
        p.validate();
    } catch (const error& e) {
        throw schema_error(where, e.what());
    }
    return p;
}

inline std::vector<double> xi_spec(const json& j, const std::string& where) {
    io::only_fields(j, where, {"min", "max", "step"});
    try {
        return merton::xi_range(io::get_number(io::need(j, where, "min"), where + ".min"),
                                io::get_number(io::need(j, where, "max"), where + ".max"),
                                io::get_number(io::need(j, where, "step"), where + ".step"));
    } catch (const schema_error&) {
        throw;
    } catch (const error& e) {
        throw schema_error(where, e.what());
    }
}

inline FormSequence sequence_from_json(const json& j, const std::string& where, const Kernel& k) {
    const auto type = io::get_string(io::need(j, where, "type"), where + ".type");
    FormSequence s;
    if (type == "gaussian_mean") {
        io::only_fields(j, where, {"type", "mean", "variance", "n_list", "truncation"});
        const double mean = j.contains("mean") ? io::get_number(j["mean"], where + ".mean") : 0.0;
        const double var = j.contains("variance") ? io::get_number(j["variance"], where + ".variance") : 1.0;
        if (!(var >= 0.0)) throw schema_error(where + ".variance", "must be nonnegative");
        std::optional<double> a;
        if (j.contains("truncation")) a = io::get_number(j["truncation"], where + ".truncation");
        s.n_list = get_list(io::need(j, where, "n_list"), where + ".n_list");
        s.generator = [=](double n) { return QuasiLinearForm::gaussian(1.0 / n, mean, var / n, a); };
        s.epsilon = [](double n) { return 1.0 / n; };
        return s;
    }
    if (type == "maxplus") {
        io::only_fields(j, where, {"type", "density", "n_list"});
        GridFn d = io::gridfn_from_json(io::need(j, where, "density"), where + ".density");
        require_same_grid(d.grid, k.y_grid(), (where + ".density must live on the kernel's y_grid").c_str());
        s.n_list = j.contains("n_list") ? get_list(j["n_list"], where + ".n_list") : std::vector<double>{1.0};
        s.generator = [d](double) { return QuasiLinearForm::max_plus(d); };
        s.epsilon = [](double) { return 0.0; };
        return s;
    }
    if (type == "merton_quadratic") {
        io::only_fields(j, where, {"type", "r", "alpha", "sigma", "w0", "T_list", "xi"});
        const merton::Params p = merton_params(j, where);
        s.n_list = get_list(io::need(j, where, "T_list"), where + ".T_list");
        std::vector<double> xi = j.contains("xi") ? xi_spec(j["xi"], where + ".xi") : merton::xi_range(0.0, 10.0, 0.05);
        s.generator = [=](double T) { return merton::quadratic_family(p, T, xi); };
        s.epsilon = [](double T) { return 1.0 / T; };
        return s;
    }
    if (type == "merton_controls") {
        io::only_fields(j, where, {"type", "r", "alpha", "sigma", "w0", "T_list", "xi", "include_xi_star", "truncation"});
        const merton::Params p = merton_params(j, where);
        s.n_list = get_list(io::need(j, where, "T_list"), where + ".T_list");
        std::vector<double> xi = xi_spec(io::need(j, where, "xi"), where + ".xi");
        if (j.contains("include_xi_star") && io::get_bool(j["include_xi_star"], where + ".include_xi_star"))
            for (std::size_t i = 0; i < k.x_grid().size(); ++i) {
                const double x = k.x_grid().coord(i);
                if (x >= 0.0 && x < 1.0) xi.push_back(merton::xi_star(x, p));
            }
        std::optional<double> a;
        if (j.contains("truncation")) a = io::get_number(j["truncation"], where + ".truncation");
        s.generator = [=](double T) {
            QuasiLinearForm f = merton::control_family(p, T, xi);
            return a ? truncate_form(f, *a) : f;
        };
        s.epsilon = [](double T) { return 1.0 / T; };
        return s;
    }
    if (type == "empirical_csv") {
        io::only_fields(j, where, {"type", "files"});
        const json& files = io::need(j, where, "files");
        if (!files.is_array() || files.empty()) throw schema_error(where + ".files", "expected a nonempty array");
        std::vector<QuasiLinearForm> forms;
        for (std::size_t i = 0; i < files.size(); ++i) {
            const std::string w = where + ".files[" + std::to_string(i) + "]";
            io::only_fields(files[i], w, {"n", "path"});
            const double n = io::get_number(io::need(files[i], w, "n"), w + ".n");
            if (!(n > 0.0)) throw schema_error(w + ".n", "must be positive");
            s.n_list.push_back(n);
            forms.push_back(io::load_empirical_csv(io::get_string(io::need(files[i], w, "path"), w + ".path"), 1.0 / n));
        }
        const std::vector<double> ns = s.n_list;
        s.generator = [forms, ns](double n) {
            for (std::size_t i = 0; i < ns.size(); ++i)
                if (ns[i] == n) return forms[i];
            throw error(errc::invalid_argument, "empirical_csv: no file for this index");
        };
        s.epsilon = [](double n) { return 1.0 / n; };
        return s;
    }
    throw schema_error(where + ".type", "unknown sequence type '" + type + "'");
}

// --------------------------------------------------------------------------

inline Artifacts run_conjugate(const json& p, const json& outputs, unsigned threads) {
    const std::string w = "conjugate";
    io::only_fields(p, w, {"kernel", "f", "direction", "method"});
    const Kernel k = io::kernel_from_json(io::need(p, w, "kernel"), w + ".kernel");
    const GridFn f = io::gridfn_from_json(io::need(p, w, "f"), w + ".f");
    const std::string dir = p.contains("direction") ? io::get_string(p["direction"], w + ".direction") : "forward";
    const std::string method = p.contains("method") ? io::get_string(p["method"], w + ".method") : "brute";
    if (dir != "forward" && dir != "dual") throw schema_error(w + ".direction", "expected forward or dual");
    if (method != "brute" && method != "fast") throw schema_error(w + ".method", "expected brute or fast");
    const Kernel kk = dir == "forward" ? k : k.transpose();
    if (!(f.grid == kk.y_grid())) throw schema_error(w + ".f", "grid does not match the kernel");

    GridFn out;
    std::vector<NodeSet> arg;
    if (method == "fast") {
        if (!kk.is_bilinear() || kk.x_grid().dim() != 1) throw schema_error(w + ".method", "fast needs a 1-D bilinear kernel");
        try {
            out = legendre_fast(f, kk.x_grid());
        } catch (const error& e) {
            throw schema_error(w + ".f", e.what());
        }
    } else {
        auto r = conjugate_with_argmax(f, kk, threads);
        out = std::move(r.value);
        arg = std::move(r.argmax);
    }

    json j;
    j["kind"] = "conjugate";
    j["direction"] = dir;
    j["method"] = method;
    j["result"] = io::to_json(out);
    if (!arg.empty()) {
        json a = json::array();
        for (const auto& s : arg) a.push_back(io::nodes_to_json(s));
        j["argmax"] = std::move(a);
    }
    std::string csv = "node,x,value\n";
    for (std::size_t i = 0; i < out.size(); ++i)
        csv += std::to_string(i) + "," + fmt(out.grid.coord(i)) + "," + to_string(out[i]) + "\n";

    Artifacts a;
    a.files.emplace_back(output_name(outputs, "json", "conjugate.json"), dump(j));
    a.files.emplace_back(output_name(outputs, "csv", "conjugate.csv"), csv);
    a.digest = "conjugate (" + dir + ", " + method + "): " + std::to_string(out.size()) + " values\n";
    return a;
}

inline Artifacts run_covering(const json& p, const json& outputs) {
    const std::string w = "covering";
    io::only_fields(p, w, {"kernel", "g", "xprime", "discrete", "stencil_radius", "certificate_tol"});
    const Kernel k = io::kernel_from_json(io::need(p, w, "kernel"), w + ".kernel");
    const GridFn g = io::gridfn_from_json(io::need(p, w, "g"), w + ".g");
    if (!(g.grid == k.x_grid())) throw schema_error(w + ".g", "grid does not match the kernel's x_grid");
    NodeSet xp;
    if (p.contains("xprime")) {
        const json& x = p["xprime"];
        if (!x.is_array()) throw schema_error(w + ".xprime", "expected an array of node indices");
        for (std::size_t i = 0; i < x.size(); ++i) {
            const auto v = io::get_count(x[i], w + ".xprime[" + std::to_string(i) + "]");
            if (v >= g.size()) throw schema_error(w + ".xprime[" + std::to_string(i) + "]", "node out of range");
            xp.push_back(v);
        }
    } else {
        for (std::size_t i = 0; i < g.size(); ++i) xp.push_back(i);
    }
    VerdictOptions vo;
    if (p.contains("discrete")) vo.discrete = io::get_bool(p["discrete"], w + ".discrete");
    if (p.contains("stencil_radius")) vo.covering.stencil_radius = io::get_count(p["stencil_radius"], w + ".stencil_radius");
    if (p.contains("certificate_tol")) vo.certificate_tol = io::get_number(p["certificate_tol"], w + ".certificate_tol");
    const Verdict v = verdict(g, k, xp, vo);

    json j;
    j["kind"] = "covering";
    j["verdict"] = io::to_json(v);

    std::ostringstream t;
    t << "existence: " << to_string(v.existence) << "   uniqueness: " << to_string(v.uniqueness) << "\n";
    t << "covered: " << (v.covering.covered ? "yes" : "no") << "   minimal_top: " << (v.covering.minimal_top ? "yes" : "no")
      << "\n";
    t << "   y  B°g(y)        alg  top  in_Z  piece\n";
    NodeMask za = to_mask(v.covering.alg_essential, k.y_grid().size());
    NodeMask zt = to_mask(v.covering.top_essential, k.y_grid().size());
    NodeMask zz = to_mask(v.covering.Z, k.y_grid().size());
    for (std::size_t y = 0; y < k.y_grid().size(); ++y) {
        if (!v.covering.piece_index[y]) continue;
        char buf[96];
        std::snprintf(buf, sizeof buf, "%4zu  %-12s  %-3s  %-3s  %-4s  {", y, to_string(v.covering.dual[y]).c_str(),
                      za[y] ? "*" : "", zt[y] ? "*" : "", zz[y] ? "*" : "");
        t << buf;
        for (std::size_t q = 0; q < v.covering.pieces[y].size(); ++q) t << (q ? "," : "") << v.covering.pieces[y][q];
        t << "}\n";
    }
    Artifacts a;
    a.files.emplace_back(output_name(outputs, "json", "covering.json"), dump(j));
    a.files.emplace_back(output_name(outputs, "table", "covering.txt"), t.str());
    a.digest = t.str();
    return a;
}

inline Artifacts run_ldp(const json& p, const json& outputs, unsigned threads) {
    const std::string w = "ldp";
    io::only_fields(p, w, {"kernel", "sequences", "mode", "stencil_radius", "window_margin", "limit_tol",
                           "assert_tightness", "check"});
    GartnerInput in{{}, io::kernel_from_json(io::need(p, w, "kernel"), w + ".kernel")};
    const json& seqs = io::need(p, w, "sequences");
    if (!seqs.is_array() || seqs.empty()) throw schema_error(w + ".sequences", "expected a nonempty array");
    for (std::size_t i = 0; i < seqs.size(); ++i)
        in.sequences.push_back(sequence_from_json(seqs[i], w + ".sequences[" + std::to_string(i) + "]", in.kernel));
    if (p.contains("mode")) {
        const auto m = io::get_string(p["mode"], w + ".mode");
        if (m == "limit") in.mode = GMode::limit_asserted;
        else if (m == "limsup") in.mode = GMode::limsup;
        else throw schema_error(w + ".mode", "expected limit or limsup");
    }
    if (p.contains("stencil_radius")) in.stencil_radius = io::get_count(p["stencil_radius"], w + ".stencil_radius");
    if (p.contains("window_margin")) {
        in.window_margin = io::get_number(p["window_margin"], w + ".window_margin");
        if (!(in.window_margin > 0.0 && in.window_margin < 0.5))
            throw schema_error(w + ".window_margin", "must lie in (0, 0.5)");
    }
    if (p.contains("limit_tol")) in.limit_tol = io::get_number(p["limit_tol"], w + ".limit_tol");
    if (p.contains("assert_tightness")) in.assert_tightness = io::get_bool(p["assert_tightness"], w + ".assert_tightness");
    in.threads = threads;

    std::optional<std::pair<std::size_t, double>> check;
    if (p.contains("check")) {
        const json& c = p["check"];
        io::only_fields(c, w + ".check", {"max_sets", "tol"});
        check = std::pair<std::size_t, double>{
            c.contains("max_sets") ? io::get_count(c["max_sets"], w + ".check.max_sets") : 200,
            c.contains("tol") ? io::get_number(c["tol"], w + ".check.tol") : 1e-3};
        if (in.sequences.size() != 1) throw schema_error(w + ".check", "needs exactly one sequence");
        if (in.kernel.y_grid().dim() != 1) throw schema_error(w + ".check", "needs a 1-D y_grid");
    }

    const GartnerOutput o = pipeline(in);
    json j;
    j["kind"] = "ldp";
    j["output"] = io::to_json(o);

    Artifacts a;
    std::ostringstream d;
    d << "verdict: " << to_string(o.verdict) << "   mode: " << to_string(o.mode) << "\n";
    d << "covered: " << (o.covering.covered ? "yes" : "no") << "   minimal_top: " << (o.covering.minimal_top ? "yes" : "no")
      << "   |Z| = " << o.Z.size() << " of " << o.rate_lower.size() << " y-nodes\n";
    for (const auto& b : o.bounds) d << "  " << b << "\n";
    for (const auto& x : o.warnings) d << "  warning: " << x << "\n";

    if (check) {
        const Grid& yg = in.kernel.y_grid();
        auto sets = default_interval_sets(yg, check->first);
        auto compact = inside_window(yg, sets, in.window_margin);
        ConvergenceOptions co;
        co.tol = check->second;
        co.threads = threads;
        const ConvergenceReport cr = ldp_bounds_check(in.sequences[0], o.Fbar, yg, sets, sets, compact, co);
        j["bounds_check"] = io::to_json(cr);
        a.files.emplace_back(output_name(outputs, "margins_csv", "margins.csv"), margins_csv(cr));
        const bool failed = cr.open_liminf.flag == Flag::fail || cr.closed_limsup.flag == Flag::fail ||
                            cr.compact_limsup.flag == Flag::fail;
        if (failed) a.status = exit_fail;
        d << "bounds check on " << sets.size() << " intervals: open " << to_string(cr.open_liminf.flag) << " (worst "
          << fmt(cr.open_liminf.worst_margin) << "), closed " << to_string(cr.closed_limsup.flag) << " (worst "
          << fmt(cr.closed_limsup.worst_margin) << "), compact " << to_string(cr.compact_limsup.flag) << " ("
          << cr.compact_limsup.tested << " sets)\n";
    }
    a.files.emplace(a.files.begin(), output_name(outputs, "json", "ldp.json"), dump(j));
    a.files.emplace_back(output_name(outputs, "rate_csv", "rate.csv"), rate_csv(o));
    a.digest = d.str();
    return a;
}

inline Artifacts run_merton(const json& p, const json& outputs, std::uint64_t seed, unsigned threads) {
    const std::string w = "merton";
    io::only_fields(p, w, {"r", "alpha", "sigma", "w0", "c", "T", "paths", "xi_min", "xi_max", "xi_step", "a",
                           "mc_T_max"});
    const merton::Params prm = merton_params(p, w);
    const double c = io::get_number(io::need(p, w, "c"), w + ".c");
    const auto T = get_list(io::need(p, w, "T"), w + ".T");
    const std::size_t paths = p.contains("paths") ? io::get_count(p["paths"], w + ".paths") : 0;
    const double xmin = p.contains("xi_min") ? io::get_number(p["xi_min"], w + ".xi_min") : 0.05;
    const double xmax = p.contains("xi_max") ? io::get_number(p["xi_max"], w + ".xi_max") : 5.0;
    const double xstep = p.contains("xi_step") ? io::get_number(p["xi_step"], w + ".xi_step") : 0.05;
    std::vector<double> xi;
    try {
        xi = merton::xi_range(xmin, xmax, xstep);
    } catch (const error& e) {
        throw schema_error(w + ".xi_step", e.what());
    }
    merton::TailOptions to;
    to.n_paths = paths;
    to.seed = seed;
    to.threads = threads;
    if (p.contains("mc_T_max")) to.mc_T_max = io::get_number(p["mc_T_max"], w + ".mc_T_max");
    const merton::TailReport rep = merton::tail_rate_experiment(c, prm, T, xi, to);

    json j;
    j["kind"] = "merton";
    j["params"] = {{"r", prm.r}, {"alpha", prm.alpha}, {"sigma", prm.sigma}, {"w0", prm.W0}};
    j["c"] = c;
    j["z0"] = merton::z0(prm);
    j["g_star_c"] = merton::g_star(c, prm);
    j["target"] = rep.target;
    j["control_oracle_rate"] = rep.oracle_rate;
    j["T"] = rep.T_list;
    json sup = json::array();
    for (double v : rep.sup_over_xi) sup.push_back(io::to_json(ExtReal(v)));
    j["sup_over_xi"] = std::move(sup);
    j["argsup_xi"] = rep.argsup_xi;
    j["monotone_toward_target"] = rep.monotone_toward_target;
    j["final_relative_error"] = rep.final_relative_error;
    if (rep.degenerate) j["note"] = rep.note;
    std::size_t mc_inconclusive = 0;
    for (const auto& cell : rep.cells) mc_inconclusive += cell.mc_inconclusive ? 1 : 0;
    j["mc_inconclusive_cells"] = mc_inconclusive;

    if (p.contains("a") && !p["a"].is_null()) {
        const double a = io::get_number(p["a"], w + ".a");
        json t;
        t["a"] = a;
        if (!(a < merton::z0(prm))) t["warning"] = "a >= z0: the truncation may change g";
        // g from the truncated control family at the largest T, against the closed form
        std::vector<double> xs, fam = xi;
        for (int k = 0; k < 10; ++k) {
            xs.push_back(0.1 * k);
            fam.push_back(merton::xi_star(0.1 * k, prm));
        }
        const QuasiLinearForm G = truncate_form(merton::control_family(prm, T.back(), fam), a);
        double worst = 0.0;
        for (double x : xs) {
            const ExtReal v = *evaluate_linear(G, x);
            worst = std::max(worst, std::abs(v.value() - merton::g_closed(x, prm).value()));
        }
        t["max_abs_g_error"] = worst;
        j["truncation"] = std::move(t);
    }

    Artifacts art;
    art.files.emplace_back(output_name(outputs, "csv", "merton.csv"), merton::tail_csv(rep));
    art.files.emplace_back(output_name(outputs, "json", "merton.json"), dump(j));
    std::ostringstream d;
    d << "c = " << c << "   target -g*(c) = " << fmt(rep.target) << "   control oracle g*(c) = " << fmt(rep.oracle_rate)
      << "\n";
    for (std::size_t i = 0; i < T.size(); ++i)
        d << "  T = " << fmt(T[i]) << "   sup over xi = " << fmt(rep.sup_over_xi[i]) << " at xi = " << fmt(rep.argsup_xi[i])
          << "\n";
    d << "monotone toward target: " << (rep.monotone_toward_target ? "yes" : "no")
      << "   final relative error: " << fmt(rep.final_relative_error) << "\n";
    art.digest = d.str();
    return art;
}

}  // namespace detail

inline json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw schema_error("config", e.what());
    }
}

/// Computes the artifacts of a scenario without touching the file system.
inline Artifacts compute(const json& cfg, const RunOptions& ro) {
    io::only_fields(cfg, "config", {"kind", "seed", "threads", "outputs", "conjugate", "covering", "ldp", "merton"});
    const auto kind = io::get_string(io::need(cfg, "config", "kind"), "config.kind");
    if (kind != "conjugate" && kind != "covering" && kind != "ldp" && kind != "merton")
        throw schema_error("config.kind", "expected conjugate, covering, ldp or merton");
    if (!ro.expected_kind.empty() && kind != ro.expected_kind)
        throw schema_error("config.kind", "is '" + kind + "' but the subcommand is '" + ro.expected_kind + "'");
    for (const char* k : {"conjugate", "covering", "ldp", "merton"})
        if (k != kind && cfg.contains(k)) throw schema_error("config", std::string("payload '") + k + "' does not match kind");
    std::uint64_t seed = cfg.contains("seed") ? io::get_count(cfg["seed"], "config.seed") : 0;
    if (ro.seed) seed = *ro.seed;
    unsigned threads = cfg.contains("threads") ? static_cast<unsigned>(io::get_count(cfg["threads"], "config.threads")) : 1;
    if (ro.threads) threads = *ro.threads;
    const json outputs = cfg.contains("outputs") ? cfg["outputs"] : json();
    if (!outputs.is_null())
        io::only_fields(outputs, "config.outputs", {"json", "csv", "table", "rate_csv", "margins_csv"});
    const json& payload = io::need(cfg, "config", kind.c_str());

    try {
        if (kind == "conjugate") return detail::run_conjugate(payload, outputs, threads);
        if (kind == "covering") return detail::run_covering(payload, outputs);
        if (kind == "ldp") return detail::run_ldp(payload, outputs, threads);
        return detail::run_merton(payload, outputs, seed, threads);
    } catch (const schema_error&) {
        throw;
    } catch (const error& e) {
        throw schema_error(kind, e.what());
    } catch (const std::invalid_argument& e) {
        throw schema_error(kind, e.what());
    }
}

/// Runs a scenario: writes the artifacts under ro.out_dir and returns the exit status.
inline int run(const json& cfg, const RunOptions& ro, std::ostream& out, std::ostream& err) {
    Artifacts a;
    try {
        a = compute(cfg, ro);
    } catch (const error& e) {
        err << "invalid scenario: " << e.what() << "\n";
        return exit_invalid;
    }
    std::error_code ec;
    std::filesystem::create_directories(ro.out_dir, ec);
    for (const auto& [name, body] : a.files) {
        const auto path = std::filesystem::path(ro.out_dir) / name;
        std::ofstream f(path, std::ios::binary);
        f << body;
        if (!f) {
            err << "cannot write " << path.string() << "\n";
            return exit_invalid;
        }
    }
    if (ro.summary) {
        out << a.digest;
        for (const auto& [name, body] : a.files) out << "wrote " << (std::filesystem::path(ro.out_dir) / name).string() << "\n";
    }
    return a.status;
}

inline int run_file(const std::string& path, const RunOptions& ro, std::ostream& out, std::ostream& err) {
    std::ifstream in(path);
    if (!in) {
        err << "cannot open " << path << "\n";
        return exit_invalid;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    json cfg;
    try {
        cfg = parse(ss.str());
    } catch (const error& e) {
        err << "invalid scenario: " << path << ": " << e.what() << "\n";
        return exit_invalid;
    }
    return run(cfg, ro, out, err);
}

}  // namespace moreau::scenario
