#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "moreau/scenario.hpp"

namespace sc = moreau::scenario;

int main(int argc, char** argv) {
    CLI::App app{"moreau: conjugacies, coverings and large deviations on grids"};
    app.require_subcommand(0, 1);

    std::string config, out_dir = ".";
    std::uint64_t seed = 0;
    unsigned threads = 1;
    bool summary = false;
    app.add_option("--config", config, "scenario JSON file");
    app.add_option("--out-dir", out_dir, "directory for the artifacts");
    auto* seed_opt = app.add_option("--seed", seed, "overrides the scenario seed");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--summary", summary, "print a short digest");

    for (const char* k : {"conjugate", "covering", "ldp"})
        app.add_subcommand(k, std::string("run a ") + k + " scenario (needs --config)")->fallthrough();

    auto* m = app.add_subcommand("merton", "tail-rate experiment for the investment model")->fallthrough();
    double r = 0.05, alpha = 0.10, sigma = 0.20, w0 = 1.0, c = 0.12, xi_min = 0.05, xi_max = 5.0, xi_step = 0.05, a = 0.0;
    std::vector<double> T;
    std::size_t paths = 0;
    std::string out;
    auto* r_opt = m->add_option("--r", r, "risk-free rate");
    auto* alpha_opt = m->add_option("--alpha", alpha, "risky drift");
    auto* sigma_opt = m->add_option("--sigma", sigma, "volatility");
    auto* w0_opt = m->add_option("--w0", w0, "initial wealth");
    auto* c_opt = m->add_option("--c", c, "threshold for log(W_T)/T");
    auto* T_opt = m->add_option("--T", T, "horizon (repeatable)")->take_all()->allow_extra_args(false);
    auto* paths_opt = m->add_option("--paths", paths, "Monte Carlo paths per cell, 0 to skip");
    auto* xmin_opt = m->add_option("--xi-min", xi_min, "smallest constant control");
    auto* xmax_opt = m->add_option("--xi-max", xi_max, "largest constant control");
    auto* xstep_opt = m->add_option("--xi-step", xi_step, "control grid step");
    auto* a_opt = m->add_option("--a", a, "truncation level");
    m->add_option("--out", out, "CSV path; the JSON report goes next to it");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : sc::exit_invalid;
    }

    if (app.get_subcommands().empty() && config.empty()) {
        std::cerr << "need a subcommand or --config\n" << app.help();
        return sc::exit_invalid;
    }
    const std::string kind = app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name();
    sc::RunOptions ro;
    ro.out_dir = out_dir;
    ro.summary = summary;
    ro.expected_kind = kind;
    if (*seed_opt) ro.seed = seed;
    if (*threads_opt) ro.threads = threads;

    sc::json cfg;
    if (!config.empty()) {
        std::ifstream in(config);
        if (!in) {
            std::cerr << "cannot open " << config << "\n";
            return sc::exit_invalid;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            cfg = sc::parse(ss.str());
        } catch (const moreau::error& e) {
            std::cerr << "invalid scenario: " << config << ": " << e.what() << "\n";
            return sc::exit_invalid;
        }
    } else if (kind != "merton") {
        std::cerr << kind << " needs --config\n";
        return sc::exit_invalid;
    } else {
        cfg = {{"kind", "merton"}, {"merton", sc::json::object()}};
    }

    if (kind == "merton" && cfg.is_object() && cfg.contains("merton") && cfg["merton"].is_object()) {
        auto& p = cfg["merton"];
        auto set = [&](CLI::Option* o, const char* key, auto v) {
            if (*o || !p.contains(key)) p[key] = v;
        };
        set(r_opt, "r", r);
        set(alpha_opt, "alpha", alpha);
        set(sigma_opt, "sigma", sigma);
        set(w0_opt, "w0", w0);
        set(c_opt, "c", c);
        if (*T_opt || !p.contains("T")) p["T"] = T.empty() ? std::vector<double>{25, 50, 100, 200} : T;
        if (*paths_opt) p["paths"] = paths;
        if (*xmin_opt) p["xi_min"] = xi_min;
        if (*xmax_opt) p["xi_max"] = xi_max;
        if (*xstep_opt) p["xi_step"] = xi_step;
        if (*a_opt) p["a"] = a;
        if (!out.empty()) {
            std::filesystem::path o(out);
            if (o.has_parent_path()) ro.out_dir = (std::filesystem::path(out_dir) / o.parent_path()).string();
            auto stem = o.stem().string();
            cfg["outputs"]["csv"] = stem + ".csv";
            cfg["outputs"]["json"] = stem + ".json";
        }
    }
    return sc::run(cfg, ro, std::cout, std::cerr);
}
