#pragma once

// JSON for grids, grid functions, kernels, forms and reports. Infinite values
// are the strings "+inf" / "-inf". Readers reject unknown fields.

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "moreau/gartner.hpp"

namespace moreau::io {

using json = nlohmann::ordered_json;

/// Raised for schema problems; `where` is the JSON path of the offending field.
class schema_error : public error {
public:
    schema_error(const std::string& where, const std::string& what) : error(errc::parse_error, where + ": " + what) {}
};

inline void only_fields(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw schema_error(where, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw schema_error(where, "unknown field '" + it.key() + "'");
    }
}

inline const json& need(const json& j, const std::string& where, const char* key) {
    if (!j.contains(key)) throw schema_error(where, std::string("missing field '") + key + "'");
    return j.at(key);
}

inline double get_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw schema_error(where, "expected a number");
    return j.get<double>();
}

inline bool get_bool(const json& j, const std::string& where) {
    if (!j.is_boolean()) throw schema_error(where, "expected true or false");
    return j.get<bool>();
}

inline std::size_t get_count(const json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<long long>() < 0) throw schema_error(where, "expected a nonnegative integer");
    return j.get<std::size_t>();
}

inline std::string get_string(const json& j, const std::string& where) {
    if (!j.is_string()) throw schema_error(where, "expected a string");
    return j.get<std::string>();
}

inline std::vector<double> get_numbers(const json& j, const std::string& where) {
    if (!j.is_array()) throw schema_error(where, "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(get_number(j[i], where + "[" + std::to_string(i) + "]"));
    return v;
}

// --------------------------------------------------------------------------

inline json to_json(ExtReal v) {
    if (v.is_pos_inf()) return "+inf";
    if (v.is_neg_inf()) return "-inf";
    return v.value();
}

inline ExtReal extreal_from_json(const json& j, const std::string& where) {
    if (j.is_number()) return ExtReal(j.get<double>());
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "+inf" || s == "inf") return ExtReal::pos_inf();
        if (s == "-inf") return ExtReal::neg_inf();
    }
    throw schema_error(where, "expected a number, \"+inf\" or \"-inf\"");
}

inline json to_json(const Grid& g) {
    json j;
    if (g.dim() == 1) {
        const Axis& a = g.axis(0);
        j["dim"] = 1;
        j["lo"] = a.lo;
        j["hi"] = a.hi;
        j["n"] = a.n;
        j["open_lo"] = a.open_lo;
        j["open_hi"] = a.open_hi;
        return j;
    }
    j["dim"] = 2;
    for (const char* k : {"lo", "hi", "n", "open_lo", "open_hi"}) j[k] = json::array();
    for (const auto& a : g.axes()) {
        j["lo"].push_back(a.lo);
        j["hi"].push_back(a.hi);
        j["n"].push_back(a.n);
        j["open_lo"].push_back(a.open_lo);
        j["open_hi"].push_back(a.open_hi);
    }
    return j;
}

inline Grid grid_from_json(const json& j, const std::string& where) {
    only_fields(j, where, {"dim", "lo", "hi", "n", "open_lo", "open_hi"});
    const std::size_t dim = j.contains("dim") ? get_count(j["dim"], where + ".dim") : 1;
    if (dim != 1 && dim != 2) throw schema_error(where + ".dim", "grids have dimension 1 or 2");
    std::vector<Axis> axes(dim);
    auto field = [&](const char* k, std::size_t a) -> const json& {
        const json& f = need(j, where, k);
        if (dim == 1) return f;
        if (!f.is_array() || f.size() != 2) throw schema_error(where + "." + k, "expected a pair for a 2-D grid");
        return f[a];
    };
    for (std::size_t a = 0; a < dim; ++a) {
        axes[a].lo = get_number(field("lo", a), where + ".lo");
        axes[a].hi = get_number(field("hi", a), where + ".hi");
        axes[a].n = get_count(field("n", a), where + ".n");
        for (const char* side : {"open_lo", "open_hi"}) {
            if (!j.contains(side)) continue;
            const json& s = dim == 1 ? j[side] : j[side].is_array() && j[side].size() == 2 ? j[side][a] : j[side];
            (std::string(side) == "open_lo" ? axes[a].open_lo : axes[a].open_hi) = get_bool(s, where + "." + side);
        }
    }
    try {
        return Grid::from_axes(axes);
    } catch (const error& e) {
        throw schema_error(where, e.what());
    }
}

inline json to_json(const GridFn& f) {
    json j;
    j["grid"] = to_json(f.grid);
    json v = json::array();
    for (const auto& x : f.values) v.push_back(to_json(x));
    j["values"] = std::move(v);
    if (f.tag != Semicontinuity::plain) j["tag"] = f.tag == Semicontinuity::lsc ? "lsc" : "usc";
    return j;
}

inline GridFn gridfn_from_json(const json& j, const std::string& where) {
    only_fields(j, where, {"grid", "values", "tag"});
    Grid g = grid_from_json(need(j, where, "grid"), where + ".grid");
    const json& v = need(j, where, "values");
    if (!v.is_array()) throw schema_error(where + ".values", "expected an array");
    if (v.size() != g.size())
        throw schema_error(where + ".values", "has " + std::to_string(v.size()) + " entries, grid has " +
                                                  std::to_string(g.size()) + " nodes");
    std::vector<ExtReal> vals;
    for (std::size_t i = 0; i < v.size(); ++i)
        vals.push_back(extreal_from_json(v[i], where + ".values[" + std::to_string(i) + "]"));
    Semicontinuity tag = Semicontinuity::plain;
    if (j.contains("tag")) {
        const auto t = get_string(j["tag"], where + ".tag");
        if (t == "lsc") tag = Semicontinuity::lsc;
        else if (t == "usc") tag = Semicontinuity::usc;
        else if (t != "plain") throw schema_error(where + ".tag", "expected lsc, usc or plain");
    }
    return GridFn(std::move(g), std::move(vals), tag);
}

inline json to_json(const Kernel& k) {
    json j;
    j["type"] = k.is_bilinear() ? "bilinear" : "table";
    j["x_grid"] = to_json(k.x_grid());
    j["y_grid"] = to_json(k.y_grid());
    if (!k.is_bilinear()) {
        json rows = json::array();
        for (std::size_t i = 0; i < k.x_grid().size(); ++i) {
            json r = json::array();
            for (std::size_t q = 0; q < k.y_grid().size(); ++q) r.push_back(to_json(k(i, q)));
            rows.push_back(std::move(r));
        }
        j["rows"] = std::move(rows);
    }
    return j;
}

inline Kernel kernel_from_json(const json& j, const std::string& where) {
    only_fields(j, where, {"type", "x_grid", "y_grid", "rows"});
    const auto type = get_string(need(j, where, "type"), where + ".type");
    Grid xg = grid_from_json(need(j, where, "x_grid"), where + ".x_grid");
    Grid yg = grid_from_json(need(j, where, "y_grid"), where + ".y_grid");
    try {
        if (type == "bilinear") {
            if (j.contains("rows")) throw schema_error(where + ".rows", "not allowed for a bilinear kernel");
            return Kernel::bilinear(std::move(xg), std::move(yg));
        }
        if (type != "table") throw schema_error(where + ".type", "expected bilinear or table");
        const json& rows = need(j, where, "rows");
        if (!rows.is_array()) throw schema_error(where + ".rows", "expected an array of rows");
        std::vector<std::vector<ExtReal>> t;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const std::string w = where + ".rows[" + std::to_string(i) + "]";
            if (!rows[i].is_array()) throw schema_error(w, "expected an array");
            std::vector<ExtReal> r;
            for (std::size_t q = 0; q < rows[i].size(); ++q)
                r.push_back(extreal_from_json(rows[i][q], w + "[" + std::to_string(q) + "]"));
            t.push_back(std::move(r));
        }
        return Kernel::table(std::move(xg), std::move(yg), t);
    } catch (const schema_error&) {
        throw;
    } catch (const error& e) {
        throw schema_error(where, e.what());
    }
}

inline json nodes_to_json(const NodeSet& s) {
    json a = json::array();
    for (auto i : s) a.push_back(i);
    return a;
}

// --------------------------------------------------------------------------

inline json to_json(const QuasiLinearForm& F) {
    return std::visit(
        [](const auto& f) -> json {
            using T = std::decay_t<decltype(f)>;
            json j;
            if constexpr (std::is_same_v<T, form::MaxPlus>) {
                j["variant"] = "max_plus";
                j["density"] = to_json(f.density);
            } else if constexpr (std::is_same_v<T, form::LogIntegral>) {
                j["variant"] = "log_integral";
                j["epsilon"] = f.epsilon;
                j["grid"] = to_json(f.grid);
                json w = json::array();
                for (double x : f.log_weights) w.push_back(std::exp(x));
                j["weights"] = std::move(w);
            } else if constexpr (std::is_same_v<T, form::Empirical>) {
                j["variant"] = "empirical";
                j["epsilon"] = f.epsilon;
                j["samples"] = f.samples;
                json w = json::array();
                for (double x : f.log_weights) w.push_back(std::exp(x));
                j["weights"] = std::move(w);
            } else if constexpr (std::is_same_v<T, form::Gaussian>) {
                j["variant"] = "gaussian";
                j["epsilon"] = f.epsilon;
                j["mean"] = f.mean;
                j["variance"] = f.variance;
                if (f.truncation) j["truncation"] = *f.truncation;
            } else if constexpr (std::is_same_v<T, form::GaussianQuadratic>) {
                j["variant"] = "gaussian_quadratic";
                j["epsilon"] = f.epsilon;
                j["mean_coef"] = f.mean_coef;
                j["var_coef"] = f.var_coef;
                j["xi_grid"] = f.xi_grid;
            } else {
                j["variant"] = "sup_family";
                json m = json::array();
                for (const auto& x : f.members) m.push_back(to_json(x));
                j["members"] = std::move(m);
            }
            return j;
        },
        F.v);
}

inline QuasiLinearForm form_from_json(const json& j, const std::string& where) {
    const auto v = get_string(need(j, where, "variant"), where + ".variant");
    auto num = [&](const char* k) { return get_number(need(j, where, k), where + "." + k); };
    try {
        if (v == "max_plus") {
            only_fields(j, where, {"variant", "density"});
            return QuasiLinearForm::max_plus(gridfn_from_json(need(j, where, "density"), where + ".density"));
        }
        if (v == "log_integral") {
            only_fields(j, where, {"variant", "epsilon", "grid", "weights"});
            return QuasiLinearForm::log_integral(num("epsilon"), grid_from_json(need(j, where, "grid"), where + ".grid"),
                                                 get_numbers(need(j, where, "weights"), where + ".weights"));
        }
        if (v == "empirical") {
            only_fields(j, where, {"variant", "epsilon", "samples", "weights"});
            std::vector<double> w;
            if (j.contains("weights")) w = get_numbers(j["weights"], where + ".weights");
            return QuasiLinearForm::empirical(num("epsilon"), get_numbers(need(j, where, "samples"), where + ".samples"), w);
        }
        if (v == "gaussian") {
            only_fields(j, where, {"variant", "epsilon", "mean", "variance", "truncation"});
            std::optional<double> a;
            if (j.contains("truncation")) a = num("truncation");
            return QuasiLinearForm::gaussian(num("epsilon"), num("mean"), num("variance"), a);
        }
        if (v == "gaussian_quadratic") {
            only_fields(j, where, {"variant", "epsilon", "mean_coef", "var_coef", "xi_grid"});
            const auto c = get_numbers(need(j, where, "mean_coef"), where + ".mean_coef");
            if (c.size() != 3) throw schema_error(where + ".mean_coef", "expected 3 coefficients");
            return QuasiLinearForm::gaussian_quadratic(num("epsilon"), {c[0], c[1], c[2]}, num("var_coef"),
                                                       get_numbers(need(j, where, "xi_grid"), where + ".xi_grid"));
        }
        if (v == "sup_family") {
            only_fields(j, where, {"variant", "members"});
            const json& m = need(j, where, "members");
            if (!m.is_array()) throw schema_error(where + ".members", "expected an array");
            std::vector<QuasiLinearForm> ms;
            for (std::size_t i = 0; i < m.size(); ++i)
                ms.push_back(form_from_json(m[i], where + ".members[" + std::to_string(i) + "]"));
            return QuasiLinearForm::sup_family(std::move(ms));
        }
    } catch (const schema_error&) {
        throw;
    } catch (const error& e) {
        throw schema_error(where, e.what());
    }
    throw schema_error(where + ".variant", "unknown variant '" + v + "'");
}

/// Empirical form from a CSV whose first column holds samples (optional
/// second column: weights). A non-numeric first line is taken as a header.
inline QuasiLinearForm load_empirical_csv(const std::string& path, double eps) {
    std::ifstream in(path);
    if (!in) throw error(errc::parse_error, "cannot open " + path);
    std::vector<double> s, w;
    std::string line;
    std::size_t lineno = 0;
    bool weighted = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::string a, b;
        std::getline(ss, a, ',');
        const bool has_b = static_cast<bool>(std::getline(ss, b, ','));
        try {
            std::size_t used = 0;
            const double x = std::stod(a, &used);
            s.push_back(x);
            if (has_b) {
                w.push_back(std::stod(b));
                weighted = true;
            } else if (weighted) {
                throw error(errc::parse_error, path + ":" + std::to_string(lineno) + ": missing weight");
            }
        } catch (const std::logic_error&) {
            if (s.empty()) continue;  // header
            throw error(errc::parse_error, path + ":" + std::to_string(lineno) + ": not a number");
        }
    }
    if (weighted && w.size() != s.size()) throw error(errc::parse_error, path + ": weights on some rows only");
    return QuasiLinearForm::empirical(eps, std::move(s), weighted ? w : std::vector<double>{});
}

// --------------------------------------------------------------------------
// Reports

inline json to_json(const CoveringReport& r) {
    json j;
    j["target"] = nodes_to_json(r.target);
    j["dual"] = to_json(r.dual);
    json pieces = json::array();
    for (std::size_t y = 0; y < r.pieces.size(); ++y) {
        if (!r.piece_index[y]) continue;
        json p;
        p["y"] = y;
        p["x_nodes"] = nodes_to_json(r.pieces[y]);
        pieces.push_back(std::move(p));
    }
    j["pieces"] = std::move(pieces);
    j["covered"] = r.covered;
    j["uncovered_nodes"] = nodes_to_json(r.uncovered);
    j["alg_essential"] = nodes_to_json(r.alg_essential);
    j["top_essential"] = nodes_to_json(r.top_essential);
    j["Z"] = nodes_to_json(r.Z);
    j["Z_boundary"] = nodes_to_json(r.Z_boundary);
    j["minimal_alg"] = r.minimal_alg;
    j["minimal_top"] = r.minimal_top;
    j["stencil_radius"] = r.stencil_radius;
    return j;
}

inline json to_json(const PreimageResult& p) {
    json j;
    j["f"] = to_json(p.f);
    j["Bf"] = to_json(p.Bf);
    j["max_excess"] = to_json(p.max_excess);
    j["equality_residual"] = p.equality_residual;
    j["inequality_nodes"] = nodes_to_json(p.inequality_nodes);
    j["mismatch_nodes"] = nodes_to_json(p.mismatch_nodes);
    j["exact"] = p.exact;
    j["result"] = p.pass ? "PASS" : "FAIL";
    return j;
}

inline json to_json(const Verdict& v) {
    json j;
    j["existence"] = to_string(v.existence);
    j["uniqueness"] = to_string(v.uniqueness);
    json a;
    a["A1_Y_discrete"] = v.assumptions.a1_discrete;
    a["A1p_dual_finite"] = v.assumptions.a1p_dual_finite;
    a["A2_dual_in_Fc"] = v.assumptions.a2_dual_in_fc;
    a["A2p_coercive"] = v.assumptions.a2p_coercive;
    a["A3"] = v.assumptions.a3;
    a["notes"] = v.assumptions.notes;
    j["assumptions"] = std::move(a);
    json q;
    q["holds"] = v.quasicontinuity.holds;
    if (v.quasicontinuity.witness) q["witness"] = *v.quasicontinuity.witness;
    j["quasicontinuity"] = std::move(q);
    j["certificate"] = to_json(v.certificate);
    j["covering"] = to_json(v.covering);
    return j;
}

inline json to_json(const StatementResult& s) {
    json j;
    j["flag"] = to_string(s.flag);
    j["tested"] = s.tested;
    j["worst_margin"] = to_json(ExtReal(s.worst_margin));
    j["witness"] = s.witness;
    return j;
}

inline json to_json(const ConvergenceReport& r) {
    json j;
    j["weak"] = to_json(r.weak);
    j["lsc_liminf"] = to_json(r.lsc_liminf);
    j["usc_limsup"] = to_json(r.usc_limsup);
    j["open_liminf"] = to_json(r.open_liminf);
    j["closed_limsup"] = to_json(r.closed_limsup);
    j["compact_limsup"] = to_json(r.compact_limsup);
    j["rho_gate"] = to_string(r.rho_gate);
    j["implication_violations"] = r.implication_violations;
    return j;
}

inline json to_json(const GartnerOutput& o) {
    json j;
    j["verdict"] = to_string(o.verdict);
    j["mode"] = to_string(o.mode);
    j["g"] = to_json(o.g);
    j["rate_lower"] = to_json(o.rate_lower);
    j["Z"] = nodes_to_json(o.Z);
    j["Z_boundary"] = nodes_to_json(o.covering.Z_boundary);
    j["covered"] = o.covering.covered;
    j["minimal_top"] = o.covering.minimal_top;
    j["uncovered_nodes"] = nodes_to_json(o.covering.uncovered);
    const auto& a = o.assumptions;
    json ar;
    ar["coercive"] = to_string(a.coercive);
    ar["strongly_coercive"] = to_string(a.strongly_coercive);
    ar["upper_coercive"] = to_string(a.upper_coercive);
    ar["dual_in_Fc"] = to_string(a.dual_in_fc);
    ar["dual_finite"] = a.dual_finite;
    ar["dual_quasicontinuous"] = a.quasicontinuity.holds;
    ar["technical_assumption"] = a.technical;
    json t;
    t["holds_evidence"] = a.tightness.holds_evidence;
    t["x0"] = a.tightness.x0 ? json(*a.tightness.x0) : json(nullptr);
    t["strong_coercivity"] = to_string(a.tightness.strong_coercivity);
    ar["tightness_criterion"] = std::move(t);
    j["assumption_report"] = std::move(ar);
    j["Fbar"] = to_json(o.Fbar);
    j["bounds"] = o.bounds;
    j["warnings"] = o.warnings;
    return j;
}

}  // namespace moreau::io
