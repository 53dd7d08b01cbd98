#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lem/io.hpp"
#include "lem/model.hpp"
#include "lem/shooting.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

fs::path scratch_root() {
    static const fs::path root = [] {
        auto p = fs::temp_directory_path() / "lem_cli_tests";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return root;
}

fs::path scratch(const std::string& name) {
    auto p = scratch_root() / name;
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args, const fs::path& dir) {
    fs::path cap = dir / "stdout.txt";
    std::string cmd = std::string(LEM_CLI_PATH) + " " + args + " > " + cap.string() + " 2>&1";
    int raw = std::system(cmd.c_str());
    RunResult r;
    r.code = (raw >= 0 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
    if (fs::exists(cap)) r.out = slurp(cap);
    return r;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

json manifest_of(const fs::path& dir) {
    json j;
    std::ifstream f(dir / "manifest.json");
    REQUIRE(f.good());
    f >> j;
    return j;
}

}  // namespace

TEST_CASE("classify prints thresholds, regime and verdict") {
    auto dir = scratch("classify");
    auto r = run_cli("classify --n 3 --alpha 2 --q 2 --out " + dir.string(), dir);
    CHECK(r.code == 0);
    CHECK(contains(r.out, "two_tilde_alpha = 1.6666666666666667"));
    CHECK(contains(r.out, "two_star_alpha = 3.3333333333333335"));
    CHECK(contains(r.out, "two_star = 6"));
    CHECK(contains(r.out, "regime = intermediate"));
    CHECK(contains(r.out, "verdict = both YES and NO depending on psi"));

    auto m = manifest_of(dir);
    CHECK(m["status"] == "ok");
    CHECK(m["command"] == "classify");
    CHECK(m["config"]["q"] == 2.0);
    CHECK(m["config"]["n"] == 3);
    CHECK(m.contains("wall_ms"));
}

TEST_CASE("classify reports an infinite Sobolev ceiling in the plane") {
    auto dir = scratch("classify2d");
    auto r = run_cli("classify --n 2 --alpha 3 --out " + dir.string(), dir);
    CHECK(r.code == 0);
    CHECK(contains(r.out, "two_star = inf"));
    // no q given: no regime row
    CHECK_FALSE(contains(r.out, "regime ="));
}

TEST_CASE("shoot writes a trajectory with sidecar and is byte-deterministic") {
    auto d1 = scratch("shoot1");
    auto r1 = run_cli("shoot --profile euclidean --n 3 --q 3 --a 1 --rmax 100 --out " + d1.string(), d1);
    CHECK(r1.code == 0);
    CHECK(contains(r1.out, "event = first_zero"));
    REQUIRE(fs::exists(d1 / "trajectory.csv"));
    REQUIRE(fs::exists(d1 / "trajectory.json"));
    auto csv = slurp(d1 / "trajectory.csv");
    CHECK(csv.rfind("r,u,du\n", 0) == 0);

    json side;
    std::ifstream(d1 / "trajectory.json") >> side;
    CHECK(side["event"] == "first_zero");
    CHECK(side["problem"]["q"] == 3.0);
    CHECK(side["problem"]["family"] == "euclidean");

    auto d2 = scratch("shoot2");
    auto r2 = run_cli("shoot --profile euclidean --n 3 --q 3 --a 1 --rmax 100 --out " + d2.string(), d2);
    CHECK(r2.code == 0);
    CHECK(slurp(d2 / "trajectory.csv") == csv);
}

TEST_CASE("explicit flags beat config-file values") {
    auto dir = scratch("config");
    fs::path cfg = dir / "cfg.json";
    {
        std::ofstream f(cfg);
        f << R"({"q": 3.0, "a": 2.0, "rmax": 50.0})" << "\n";
    }
    auto r = run_cli("shoot --config " + cfg.string() + " --profile euclidean --a 1 --out " + dir.string(), dir);
    CHECK(r.code == 0);
    auto m = manifest_of(dir);
    CHECK(m["config"]["q"] == 3.0);    // from config file
    CHECK(m["config"]["rmax"] == 50.0);
    CHECK(m["config"]["a"] == 1.0);    // flag wins
}

TEST_CASE("unknown config keys are rejected as input errors") {
    auto dir = scratch("badcfg");
    fs::path cfg = dir / "cfg.json";
    {
        std::ofstream f(cfg);
        f << R"({"qq": 3.0})" << "\n";
    }
    auto r = run_cli("shoot --config " + cfg.string() + " --out " + dir.string(), dir);
    CHECK(r.code == 1);
}

TEST_CASE("bad profile name fails with exit code 1 and still writes a manifest") {
    auto dir = scratch("badprofile");
    auto r = run_cli("shoot --profile nosuch --out " + dir.string(), dir);
    CHECK(r.code == 1);
    auto m = manifest_of(dir);
    CHECK(m["status"] == "error");
    CHECK(m["exit_code"] == 1);
    CHECK(contains(m["error"].get<std::string>(), "profile"));
}

TEST_CASE("a profile file that fails validation exits with the numeric code") {
    auto dir = scratch("badtab");
    {
        std::ofstream csv(dir / "bad.csv");
        csv << "r,psi,dpsi,ddpsi\n";
        for (int i = 1; i <= 120; ++i) {
            double r = 0.05 * i;
            csv << io::format_double(r) << "," << io::format_double(2.0 * r) << ",2,0\n";
        }
    }
    {
        std::ofstream pj(dir / "bad_profile.json");
        json j;
        j["family"] = "tabulated";
        j["params"] = {{"alpha", 1.0}};
        j["validation"] = {{"r_max", 5.0}, {"tol", 1e-6}};
        j["data"] = "bad.csv";
        pj << j.dump(2) << "\n";
    }
    auto r = run_cli("shoot --profile " + (dir / "bad_profile.json").string() + " --out " + dir.string(), dir);
    CHECK(r.code == 2);
    CHECK(manifest_of(dir)["status"] == "error");
}

TEST_CASE("branch command emits csv, refinement json and counters") {
    auto dir = scratch("branch");
    auto r = run_cli("branch --profile euclidean --n 3 --q 3 --a-min 0.5 --a-max 4 --count 8 "
                     "--rmax 60 --out " + dir.string(), dir);
    CHECK(r.code == 0);
    CHECK(contains(r.out, "points = 8"));
    CHECK(contains(r.out, "violations = 0"));
    auto csv = slurp(dir / "branch.csv");
    CHECK(csv.rfind("a,rho,u0_check\n", 0) == 0);
    json nu;
    std::ifstream(dir / "nonuniq.json") >> nu;
    CHECK(nu.is_array());
    CHECK(nu.empty());
}

TEST_CASE("dirichlet command solves the unit hyperbolic ball") {
    auto dir = scratch("ball");
    auto r = run_cli("dirichlet --profile hyperbolic --n 3 --q 2 --R 1 --a-lo 0.5 --a-hi 1000 --out "
                     + dir.string(), dir);
    CHECK(r.code == 0);
    json b;
    std::ifstream(dir / "ball.json") >> b;
    CHECK(b["R"] == 1.0);
    CHECK(b["mass"].get<double>() > 0.0);
    CHECK(b["zero_residual"].get<double>() < 1e-8);
    CHECK(fs::exists(dir / "ball.csv"));
}

TEST_CASE("embed command prints the compactness verdict") {
    auto dir = scratch("embed");
    auto r = run_cli("embed --profile shifted_power --alpha 2 --n 3 --p 4 --out " + dir.string(), dir);
    CHECK(r.code == 0);
    CHECK(contains(r.out, "verdict = continuous_and_compact"));
    auto csv = slurp(dir / "embed.csv");
    CHECK(csv.rfind("r,B\n", 0) == 0);
}

TEST_CASE("sobolev command writes the scan table") {
    auto dir = scratch("sobolev");
    auto r = run_cli("sobolev --profile shifted_power --alpha 2 --n 3 --q 2 --R 4 --R 8 "
                     "--mesh 128 --out " + dir.string(), dir);
    CHECK(r.code == 0);
    auto csv = slurp(dir / "scan.csv");
    CHECK(csv.rfind("R,I_R,mass,iterations,converged\n", 0) == 0);
    CHECK(contains(r.out, "rows = 2"));
}

TEST_CASE("supersol command exports its certificate") {
    auto dir = scratch("supersol");
    auto r = run_cli("supersol --profile shifted_power --alpha 2 --n 3 --q 2 --out " + dir.string(), dir);
    CHECK(r.code == 0);
    json s;
    std::ifstream(dir / "supersol.json") >> s;
    CHECK(s["A"].get<double>() == doctest::Approx(0.9));
    CHECK(s["min_residual"].get<double>() >= 0.0);
}

TEST_CASE("sweep grid is complete, labeled and deterministic") {
    auto d1 = scratch("sweep1");
    std::string args = "sweep --profile euclidean --n 3 --q-range 2:3:0.5 --a-range 0.5:2:log3 "
                       "--rmax 60 --threads 2 --out ";
    auto r1 = run_cli(args + d1.string(), d1);
    CHECK(r1.code == 0);
    CHECK(contains(r1.out, "cells = 9"));
    auto csv = slurp(d1 / "sweep.csv");
    CHECK(csv.rfind("alpha,q,a,event,pohozaev_monotone\n", 0) == 0);
    int lines = 0;
    for (char ch : csv)
        if (ch == '\n') ++lines;
    CHECK(lines == 10);
    CHECK(contains(csv, "zero-found"));
    CHECK_FALSE(contains(csv, "error"));

    auto d2 = scratch("sweep2");
    auto r2 = run_cli(args + d2.string(), d2);
    CHECK(r2.code == 0);
    CHECK(slurp(d2 / "sweep.csv") == csv);
}

TEST_CASE("malformed range specs exit with the input code") {
    auto dir = scratch("badrange");
    auto r = run_cli("sweep --profile euclidean --q-range 3:1:0.5 --out " + dir.string(), dir);
    CHECK(r.code == 1);
}

TEST_CASE("profile json round-trips through save and load") {
    auto dir = scratch("profiles");
    auto sp = manifold::make_shifted_power(2.0);
    io::save_profile(dir / "sp.json", *sp, 1e3);
    auto back = io::load_profile(dir / "sp.json");
    CHECK(back->family() == manifold::Family::shifted_power);
    CHECK(back->alpha().value() == 2.0);
    CHECK(back->eval(1.7).psi == sp->eval(1.7).psi);

    auto cp = manifold::make_comparison(2.0, 1.0, 1.0).profile;
    io::save_profile(dir / "cp.json", *cp, 1e3);
    auto cback = io::load_profile(dir / "cp.json");
    CHECK(cback->family() == manifold::Family::comparison);
    CHECK(cback->eval(3.0).psi == doctest::Approx(cp->eval(3.0).psi).epsilon(1e-12));

    auto lp = manifold::make_linear_power(2.0, 1.0);
    io::save_profile(dir / "lp.json", *lp, 1e3);
    auto lback = io::load_profile(dir / "lp.json");
    CHECK(lback->eval(5.0).psi == doctest::Approx(lp->eval(5.0).psi).epsilon(1e-12));

    auto tab = manifold::tabulate(*sp, 4.0, 1e-3, 1e3);
    io::save_profile(dir / "tab.json", *tab, 1e2);
    REQUIRE(fs::exists(dir / "tab.csv"));
    auto tback = io::load_profile(dir / "tab.json");
    CHECK(tback->family() == manifold::Family::tabulated);
    for (double r : {0.4, 2.0, 40.0})
        CHECK(tback->eval(r).psi == doctest::Approx(sp->eval(r).psi).epsilon(1e-6));
}

TEST_CASE("trajectory and tabulated csv readers invert the writers") {
    auto dir = scratch("io");
    auto eu = manifold::make_euclidean();
    auto t = shooting::integrate_cauchy({eu, 3, 3.0, 1.0}, 5.0);
    io::write_trajectory(dir / "t.csv", t);
    auto txt = slurp(dir / "t.csv");
    CHECK(txt.rfind("r,u,du\n", 0) == 0);

    std::vector<double> grid = {0.5, 1.0, 2.0, 4.0};
    io::write_tabulated_csv(dir / "g.csv", *eu, grid);
    auto gp = io::read_tabulated_csv(dir / "g.csv");
    CHECK(gp->eval(1.0).psi == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(io::format_double(1.0) == "1");
    CHECK(io::format_double(0.1) == "0.10000000000000001");
    CHECK(io::format_double(252.0) == "252");
}
