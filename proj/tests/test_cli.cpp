#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "moreau/io.hpp"
#include "moreau/scenario.hpp"

using namespace moreau;
namespace fs = std::filesystem;
using io::json;

namespace {

const std::string src = MOREAU_SOURCE_DIR;
const std::string cli = MOREAU_CLI;

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("moreau_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

int run(const std::string& args) {
    const int rc = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

}  // namespace

TEST_CASE("bundled scenarios run with exit 0") {
    const fs::path d = fresh_dir("bundled");
    for (const char* name : {"gaussian_ldp", "merton_tailrate", "merton_truncated_ldp", "conjugate_identity",
                             "conjugate_legendre", "covering_all_zero", "covering_identity"}) {
        INFO(name);
        CHECK(run("--config " + src + "/scenarios/" + name + ".json --out-dir " + d.string()) == 0);
    }
    const std::string ldp = slurp(d / "gaussian_ldp.json");
    CHECK(ldp.find("\"FULL_LDP\"") != std::string::npos);
    CHECK(fs::exists(d / "gaussian_rate.csv"));

    // the last row of the tail table carries the target -g*(0.12)
    std::istringstream csv(slurp(d / "merton_tailrate.csv"));
    std::string line, last;
    while (std::getline(csv, line))
        if (!line.empty()) last = line;
    const double target = std::stod(last.substr(last.rfind(',') + 1));
    CHECK(std::abs(target + 0.0077086) <= 1e-7);
}

TEST_CASE("subcommand must match the scenario kind") {
    const fs::path d = fresh_dir("kind");
    const std::string cfg = src + "/scenarios/covering_identity.json";
    CHECK(run("covering --config " + cfg + " --out-dir " + d.string()) == 0);
    CHECK(run("ldp --config " + cfg + " --out-dir " + d.string()) == 3);
    CHECK(run("conjugate --out-dir " + d.string()) == 3);
}

TEST_CASE("invalid configs exit 3") {
    const fs::path d = fresh_dir("invalid");
    write(d / "truncated.json", "{\"kind\": \"covering\", \"covering\": {");
    CHECK(run("--config " + (d / "truncated.json").string() + " --out-dir " + d.string()) == 3);
    CHECK(run("--config " + (d / "missing.json").string()) == 3);

    json j = json::parse(slurp(src + "/scenarios/covering_identity.json"));
    j["covering"]["colour"] = "blue";
    write(d / "unknown.json", j.dump());
    CHECK(run("--config " + (d / "unknown.json").string() + " --out-dir " + d.string()) == 3);

    j = json::parse(slurp(src + "/scenarios/covering_identity.json"));
    j["covering"]["g"]["values"] = {1, 2, 3};
    write(d / "shape.json", j.dump());
    CHECK(run("--config " + (d / "shape.json").string() + " --out-dir " + d.string()) == 3);
    CHECK(run("merton --sigma -1 --out-dir " + d.string()) == 3);
    CHECK(run("--bogus") == 3);
}

TEST_CASE("parse errors name the line") {
    try {
        scenario::parse("{\n  \"kind\": \"ldp\",\n  oops\n}");
        FAIL("expected a parse error");
    } catch (const error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("merton flags without a config") {
    const fs::path d = fresh_dir("merton");
    CHECK(run("merton --c 0.12 --T 25 --T 50 --xi-min 0.5 --xi-max 5 --xi-step 0.5 --out tail.csv --out-dir " + d.string()) == 0);
    const std::string csv = slurp(d / "tail.csv");
    CHECK(csv.rfind("T,xi,exact_value,mc_value,mc_se,sup_over_xi,target_minus_gstar\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 10);
    CHECK(fs::exists(d / "tail.json"));
}

TEST_CASE("reruns are byte-identical") {
    const fs::path a = fresh_dir("rerun_a"), b = fresh_dir("rerun_b");
    const std::string cfg = src + "/scenarios/merton_tailrate.json";
    REQUIRE(run("merton --config " + cfg + " --paths 2000 --out-dir " + a.string()) == 0);
    REQUIRE(run("merton --config " + cfg + " --paths 2000 --threads 2 --out-dir " + b.string()) == 0);
    CHECK(slurp(a / "merton_tailrate.csv") == slurp(b / "merton_tailrate.csv"));
    CHECK(slurp(a / "merton_tailrate.json") == slurp(b / "merton_tailrate.json"));
    REQUIRE(run("merton --config " + cfg + " --paths 2000 --seed 99 --out-dir " + b.string()) == 0);
    CHECK(slurp(a / "merton_tailrate.csv") != slurp(b / "merton_tailrate.csv"));
}

TEST_CASE("scenario round trip") {
    for (const char* name : {"gaussian_ldp", "merton_truncated_ldp", "covering_all_zero"}) {
        const json j = scenario::parse(slurp(src + "/scenarios/" + name + ".json"));
        CHECK(scenario::parse(j.dump(2)) == j);
        CHECK(scenario::compute(scenario::parse(j.dump()), {}).files == scenario::compute(j, {}).files);
    }
}

TEST_CASE("io round trips") {
    const Grid g(Axis{-1, 2, 7, true, false});
    CHECK(io::to_json(io::grid_from_json(io::to_json(g), "g")) == io::to_json(g));

    const GridFn f(Grid::line(0, 1, 3), {ExtReal::neg_inf(), ExtReal(0.1), ExtReal::pos_inf()});
    const GridFn f2 = io::gridfn_from_json(io::to_json(f), "f");
    CHECK(f2.values == f.values);
    CHECK(io::to_json(f)["values"][0] == "-inf");

    const Kernel k = Kernel::bilinear(Grid::line(-1, 1, 3), Grid::line(0, 1, 2));
    const Kernel k2 = io::kernel_from_json(io::to_json(k), "k");
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(k2(i, j) == k(i, j));

    const std::vector<QuasiLinearForm> forms = {
        QuasiLinearForm::max_plus(f),
        QuasiLinearForm::log_integral(0.5, f.grid, {1, 2, 3}),
        QuasiLinearForm::empirical(0.25, {0.1, 0.2}),
        QuasiLinearForm::gaussian(0.1, 0.0, 0.2, -0.5),
        QuasiLinearForm::gaussian_quadratic(0.1, {0.05, 0.05, -0.02}, 0.04, {0.5, 1.0}),
        QuasiLinearForm::sup_family({QuasiLinearForm::gaussian(0.1, 0.0, 0.2), QuasiLinearForm::empirical(0.1, {0.3})}),
    };
    for (const auto& F : forms) {
        const json j = io::to_json(F);
        CHECK(io::to_json(io::form_from_json(j, "F")) == j);
    }
    json bad = io::to_json(forms[3]);
    bad["extra"] = 1;
    CHECK_THROWS_AS(io::form_from_json(bad, "F"), io::schema_error);
}
