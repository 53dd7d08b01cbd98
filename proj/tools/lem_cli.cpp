// lem — command line front end for the Lane-Emden model-manifold laboratory.
// Subcommands: classify shoot pohozaev branch dirichlet sobolev embed glue
// supersol sweep. A JSON config file may preset any long option (explicit
// flags win), and every run writes <out>/manifest.json with the resolved
// configuration, wall time and status — also when the run fails.
// Exit codes: 0 ok, 1 bad input, 2 numeric non-convergence, 3 internal.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lem/constructions.hpp"
#include "lem/diagnostics.hpp"
#include "lem/dirichlet.hpp"
#include "lem/io.hpp"
#include "lem/model.hpp"
#include "lem/shooting.hpp"
#include "lem/sobolev.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lem;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Opts {
    std::string out = "out";
    std::string config;
    std::string profile = "euclidean";
    int n = 3;
    double alpha = 2.0;
    double q = 2.0;
    double a = 1.0;
    double rtol = 1e-10;
    double atol = 1e-12;
    double rmax = 500.0;
    int threads = 0;
    std::uint64_t seed = 0;
    int samples = 2000;
    bool past_zero = false;
    std::string f_name = "tanh";
    double f_scale = 1.0;
    double r_switch = 1.0;
    // branch
    double a_min = 1e-2;
    double a_max = 1e2;
    int count = 64;
    // dirichlet
    double R = 1.0;
    double a_lo = 1e-3;
    double a_hi = 1e3;
    // sobolev
    std::vector<double> R_list;
    int mesh = 512;
    // embed
    double p = 2.0;
    double r_lo = 1e-4;
    double r_hi = 1e4;
    int per_decade = 32;
    // supersol
    double eps = 0.0;  // 0 = automatic
    // sweep
    std::string alpha_range, q_range, a_range;

    bool cfg_has_q = false;
};

std::string normalized(std::string s) {
    std::replace(s.begin(), s.end(), '-', '_');
    return s;
}

void apply_config_value(Opts& o, const std::string& raw_key, const json& v) {
    const std::string key = normalized(raw_key);
    auto num = [&] {
        if (!v.is_number()) throw std::invalid_argument("config key '" + raw_key + "' must be a number");
        return v.get<double>();
    };
    auto integer = [&] { return static_cast<int>(num()); };
    auto text = [&] {
        if (!v.is_string()) throw std::invalid_argument("config key '" + raw_key + "' must be a string");
        return v.get<std::string>();
    };
    if (key == "out") o.out = text();
    else if (key == "profile") o.profile = text();
    else if (key == "f") o.f_name = text();
    else if (key == "alpha_range") o.alpha_range = text();
    else if (key == "q_range") o.q_range = text();
    else if (key == "a_range") o.a_range = text();
    else if (key == "n") o.n = integer();
    else if (key == "threads") o.threads = integer();
    else if (key == "count") o.count = integer();
    else if (key == "mesh") o.mesh = integer();
    else if (key == "samples") o.samples = integer();
    else if (key == "per_decade") o.per_decade = integer();
    else if (key == "seed") o.seed = static_cast<std::uint64_t>(num());
    else if (key == "alpha") o.alpha = num();
    else if (key == "q") { o.q = num(); o.cfg_has_q = true; }
    else if (key == "a") o.a = num();
    else if (key == "rtol") o.rtol = num();
    else if (key == "atol") o.atol = num();
    else if (key == "rmax") o.rmax = num();
    else if (key == "p") o.p = num();
    else if (key == "R" || key == "r") o.R = num();
    else if (key == "a_min") o.a_min = num();
    else if (key == "a_max") o.a_max = num();
    else if (key == "a_lo") o.a_lo = num();
    else if (key == "a_hi") o.a_hi = num();
    else if (key == "eps") o.eps = num();
    else if (key == "f_scale") o.f_scale = num();
    else if (key == "r_switch") o.r_switch = num();
    else if (key == "r_lo") o.r_lo = num();
    else if (key == "r_hi") o.r_hi = num();
    else if (key == "past_zero") o.past_zero = v.is_boolean() ? v.get<bool>() : (num() != 0);
    else if (key == "R_list" || key == "r_list") {
        if (!v.is_array()) throw std::invalid_argument("config key '" + raw_key + "' must be an array");
        o.R_list.clear();
        for (const auto& e : v) o.R_list.push_back(e.get<double>());
    } else {
        throw std::invalid_argument("unknown config key '" + raw_key + "'");
    }
}

// the config file is applied before CLI11 parses argv, so explicit flags win
void apply_config(const std::vector<std::string>& args, Opts& o) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const std::exception& e) {
        throw std::invalid_argument("config file '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config file '" + path + "' must hold a JSON object");
    for (const auto& [k, v] : j.items()) apply_config_value(o, k, v);
}

json config_json(const std::string& cmd, const Opts& o) {
    json c;
    c["command"] = cmd;
    c["out"] = o.out;
    c["profile"] = o.profile;
    c["n"] = o.n;
    c["alpha"] = o.alpha;
    c["q"] = o.q;
    c["a"] = o.a;
    c["rtol"] = o.rtol;
    c["atol"] = o.atol;
    c["rmax"] = o.rmax;
    c["threads"] = o.threads;
    c["seed"] = o.seed;
    c["samples"] = o.samples;
    c["past_zero"] = o.past_zero;
    c["f"] = o.f_name;
    c["f_scale"] = o.f_scale;
    c["r_switch"] = o.r_switch;
    c["a_min"] = o.a_min;
    c["a_max"] = o.a_max;
    c["count"] = o.count;
    c["R"] = o.R;
    c["a_lo"] = o.a_lo;
    c["a_hi"] = o.a_hi;
    c["R_list"] = o.R_list;
    c["mesh"] = o.mesh;
    c["p"] = o.p;
    c["r_lo"] = o.r_lo;
    c["r_hi"] = o.r_hi;
    c["per_decade"] = o.per_decade;
    c["eps"] = o.eps;
    c["alpha_range"] = o.alpha_range;
    c["q_range"] = o.q_range;
    c["a_range"] = o.a_range;
    return c;
}

void write_manifest(const fs::path& dir, const std::string& cmd, const Opts& o,
                    int exit_code, const std::string& error, double wall_ms) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    json m;
    m["command"] = cmd;
    m["status"] = exit_code == 0 ? "ok" : "error";
    m["exit_code"] = exit_code;
    if (!error.empty()) m["error"] = error;
    m["wall_ms"] = wall_ms;
    m["versions"] = {{"lem", kVersion}, {"manifest", 1}};
    m["config"] = config_json(cmd, o);
    std::ofstream out(dir / "manifest.json");
    if (out) out << m.dump(2) << "\n";
}

bool is_known_name(const std::string& name) {
    static const std::vector<std::string> kNames = {
        "euclidean", "hyperbolic", "shifted_power", "arctan", "arctan_family",
        "f_family", "linear_power"};
    return std::find(kNames.begin(), kNames.end(), name) != kNames.end();
}

manifold::ProfilePtr profile_by_name(const std::string& name, const Opts& o, double alpha) {
    if (name == "euclidean") return manifold::make_euclidean();
    if (name == "hyperbolic") return manifold::make_hyperbolic();
    if (name == "shifted_power") return manifold::make_shifted_power(alpha);
    if (name == "arctan" || name == "arctan_family") return manifold::make_arctan_profile(alpha);
    if (name == "f_family") return manifold::make_f_profile(alpha, o.f_name, o.f_scale);
    if (name == "linear_power") return manifold::make_linear_power(alpha, o.r_switch);
    throw std::invalid_argument("unknown profile '" + name + "'");
}

manifold::ProfilePtr resolve_profile(const Opts& o) {
    const std::string name = normalized(o.profile);
    if (is_known_name(name)) return profile_by_name(name, o, o.alpha);
    if (fs::exists(o.profile)) return io::load_profile(o.profile);
    throw std::invalid_argument("profile '" + o.profile + "' is neither a known name nor a file");
}

std::string print(double v) { return io::format_double(v); }

// "lo:hi:step" arithmetic, "lo:hi:logN" geometric with N points, or a single value
std::vector<double> parse_range(const std::string& spec, double fallback) {
    if (spec.empty()) return {fallback};
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : spec) {
        if (ch == ':') { parts.push_back(cur); cur.clear(); }
        else cur.push_back(ch);
    }
    parts.push_back(cur);
    try {
        if (parts.size() == 1) return {std::stod(parts[0])};
        if (parts.size() != 3) throw std::invalid_argument("expected lo:hi:step or lo:hi:logN");
        const double lo = std::stod(parts[0]);
        const double hi = std::stod(parts[1]);
        std::vector<double> vals;
        if (parts[2].rfind("log", 0) == 0) {
            const int N = std::stoi(parts[2].substr(3));
            if (N < 2 || lo <= 0 || hi <= lo) throw std::invalid_argument("bad log range");
            const double ratio = std::pow(hi / lo, 1.0 / (N - 1));
            for (int k = 0; k < N; ++k) vals.push_back(lo * std::pow(ratio, k));
        } else {
            const double step = std::stod(parts[2]);
            if (step <= 0 || hi < lo) throw std::invalid_argument("bad arithmetic range");
            const int N = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
            for (int k = 0; k < N; ++k) vals.push_back(lo + k * step);
        }
        return vals;
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("cannot parse range '" + spec + "'");
    }
}

shooting::Options shoot_options(const Opts& o) {
    shooting::Options s;
    s.rtol = o.rtol;
    s.atol = o.atol;
    s.samples_hint = o.samples;
    s.continue_past_zero = o.past_zero;
    return s;
}

std::string existence_verdict(manifold::RegimeLabel l) {
    using L = manifold::RegimeLabel;
    switch (l) {
        case L::strongly_subcritical: return "NO: no nontrivial nonnegative supersolutions";
        case L::intermediate:
        case L::intermediate_critical: return "both YES and NO depending on psi";
        case L::slightly_subcritical:
        case L::at_or_above_sobolev_critical: return "YES: positive solutions exist";
    }
    return "";
}

void run_classify(const Opts& o, bool got_q) {
    const auto e = manifold::critical_exponents(o.n, o.alpha);
    std::cout << "n = " << o.n << "\n";
    std::cout << "alpha = " << print(o.alpha) << "\n";
    std::cout << "two_tilde_alpha = " << print(e.two_tilde) << "\n";
    std::cout << "two_star_alpha = " << print(e.two_star_alpha) << "\n";
    std::cout << "two_star = " << print(e.two_star) << "\n";
    std::cout << "q_thresholds = " << print(e.two_tilde) << " " << print(e.two_star_alpha - 1)
              << " " << print(e.two_star - 1) << "\n";
    if (got_q) {
        const auto reg = manifold::classify_regime(o.n, o.alpha, o.q);
        std::cout << "q = " << print(o.q) << "\n";
        std::cout << "regime = " << manifold::regime_name(reg.label) << "\n";
        std::cout << "verdict = " << existence_verdict(reg.label) << "\n";
    }
}

void run_shoot(const Opts& o, const fs::path& out) {
    auto psi = resolve_profile(o);
    const shooting::CauchyProblem prob{psi, o.n, o.q, o.a};
    const auto t = shooting::integrate_cauchy(prob, o.rmax, shoot_options(o));
    io::write_trajectory(out / "trajectory.csv", t);
    std::cout << "event = " << shooting::event_name(t.event) << "\n";
    std::cout << "r_event = " << print(t.r_event) << "\n";
    std::cout << "zeros = " << t.zeros.size() << "\n";
    std::cout << "samples = " << t.r.size() << "\n";
}

void run_pohozaev(const Opts& o, const fs::path& out) {
    auto psi = resolve_profile(o);
    const shooting::CauchyProblem prob{psi, o.n, o.q, o.a};
    const auto t = shooting::integrate_cauchy(prob, o.rmax, shoot_options(o));
    const auto tr = diagnostics::pohozaev(t);
    io::write_trajectory(out / "trajectory.csv", t);
    io::write_trace(out / "trace.csv", tr);
    std::cout << "event = " << shooting::event_name(t.event) << "\n";
    std::cout << "identity_error = " << print(diagnostics::rate_identity(tr)) << "\n";
    std::cout << "min_increment = " << print(diagnostics::min_increment(tr)) << "\n";
}

void run_branch(const Opts& o, const fs::path& out) {
    auto psi = resolve_profile(o);
    const auto b = dirichlet::branch_trace(psi, o.n, o.q, o.a_min, o.a_max, o.count, o.rmax,
                                           shoot_options(o), o.threads);
    io::write_branch(out / "branch.csv", b);
    bool warn = false;
    const auto triples = dirichlet::detect_nonuniqueness(b, &warn);
    io::write_nonuniq(out / "nonuniq.json", triples);
    std::cout << "points = " << b.points.size() << "\n";
    std::cout << "violations = " << b.monotone_violations.size() << "\n";
    std::cout << "triples = " << triples.size() << "\n";
    std::cout << "bracket_warning = " << (warn ? 1 : 0) << "\n";
}

void run_dirichlet(const Opts& o, const fs::path& out) {
    auto psi = resolve_profile(o);
    const auto s = dirichlet::dirichlet_solution(psi, o.n, o.q, o.R, o.a_lo, o.a_hi, shoot_options(o));
    io::write_trajectory(out / "ball.csv", s.trajectory);
    json j;
    j["R"] = s.R;
    j["a"] = s.a;
    j["mass"] = s.mass;
    j["sobolev_quotient"] = s.sobolev_quotient;
    j["zero_residual"] = s.zero_residual;
    std::ofstream f(out / "ball.json");
    f << j.dump(2) << "\n";
    std::cout << "R = " << print(s.R) << "\n";
    std::cout << "a = " << print(s.a) << "\n";
    std::cout << "mass = " << print(s.mass) << "\n";
    std::cout << "sobolev_quotient = " << print(s.sobolev_quotient) << "\n";
    std::cout << "zero_residual = " << print(s.zero_residual) << "\n";
}

void run_sobolev(const Opts& o, const fs::path& out) {
    auto psi = resolve_profile(o);
    std::vector<double> Rs = o.R_list;
    if (Rs.empty()) Rs = {1, 2, 4, 8, 16, 32};
    const auto scan = sobolev::quotient_limit_scan(*psi, o.n, o.q, Rs, o.mesh, o.threads);
    io::write_scan(out / "scan.csv", scan);
    std::cout << "rows = " << scan.rows.size() << "\n";
    std::cout << "fitted_slope = " << print(scan.fitted_slope) << "\n";
    std::cout << "last_doubling_change = " << print(scan.last_doubling_change) << "\n";
}

void run_embed(const Opts& o, const fs::path& out) {
    auto psi = resolve_profile(o);
    const auto rep = sobolev::embedding_report(*psi, o.n, o.p, o.r_lo, o.r_hi, o.per_decade);
    std::ofstream f(out / "embed.csv");
    if (!f) throw std::runtime_error("cannot write embed.csv");
    f << "r,B\n";
    for (std::size_t i = 0; i < rep.r.size(); ++i)
        f << io::format_double(rep.r[i]) << "," << io::format_double(rep.B[i]) << "\n";
    std::cout << "p = " << print(rep.p) << "\n";
    std::cout << "verdict = " << sobolev::verdict_name(rep.verdict) << "\n";
    std::cout << "sup_B = " << print(rep.sup_B) << "\n";
    std::cout << "limit_0 = " << print(rep.limit_0) << "\n";
    std::cout << "limit_inf = " << print(rep.limit_inf) << "\n";
}

void run_glue(const Opts& o, const fs::path& out) {
    const auto g = constructions::build_glued_manifold(o.n, o.alpha, o.q);
    io::save_glued(out / "glued", g);
    std::cout << "r_tilde = " << print(g.final.r_tilde) << "\n";
    std::cout << "r_bar = " << print(g.final.r_bar) << "\n";
    std::cout << "a_ball = " << print(g.lip.a_ball) << "\n";
    std::cout << "kappa = " << print(g.lip.kappa) << "\n";
    std::cout << "eps = " << print(g.final.eps) << "\n";
    std::cout << "width = " << print(g.final.width) << "\n";
    std::cout << "K = " << print(g.final.K) << "\n";
    std::cout << "min_G = " << print(g.final.min_G) << "\n";
    std::cout << "kappa_tail = " << print(g.final.kappa_tail) << "\n";
}

void run_supersol(const Opts& o, const fs::path& out) {
    auto psi = resolve_profile(o);
    std::optional<double> eps;
    if (o.eps > 0) eps = o.eps;
    const auto s = constructions::build_supersolution(*psi, o.n, o.alpha, o.q, eps);
    json j;
    j["n"] = s.n;
    j["alpha"] = s.alpha;
    j["q"] = s.q;
    j["A"] = s.A;
    j["B"] = s.B;
    j["eps"] = s.eps;
    j["r_eps"] = s.r_eps;
    j["rounds"] = s.rounds;
    j["min_residual"] = s.min_residual;
    std::ofstream f(out / "supersol.json");
    f << j.dump(2) << "\n";
    std::cout << "A = " << print(s.A) << "\n";
    std::cout << "B = " << print(s.B) << "\n";
    std::cout << "eps = " << print(s.eps) << "\n";
    std::cout << "r_eps = " << print(s.r_eps) << "\n";
    std::cout << "rounds = " << s.rounds << "\n";
    std::cout << "min_residual = " << print(s.min_residual) << "\n";
}

void run_sweep(const Opts& o, const fs::path& out) {
    const std::string name = normalized(o.profile);
    const bool from_file = !is_known_name(name);
    const auto alphas = parse_range(o.alpha_range, o.alpha);
    const auto qs = parse_range(o.q_range, o.q);
    const auto as = parse_range(o.a_range, o.a);
    if (from_file && alphas.size() > 1)
        throw std::invalid_argument("--alpha-range needs a named profile family, not a file");

    struct Cell {
        double alpha = 0, q = 0, a = 0;
        std::string event = "error";
        int monotone = 0;
    };
    std::vector<Cell> cells;
    for (double al : alphas)
        for (double qv : qs)
            for (double av : as) cells.push_back({al, qv, av, "error", 0});

    // profiles depend on alpha only; reuse one per alpha value
    std::vector<manifold::ProfilePtr> psis;
    for (double al : alphas) {
        Opts tmp = o;
        tmp.alpha = al;
        psis.push_back(resolve_profile(tmp));
    }

    const auto opt = shoot_options(o);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            Cell& c = cells[i];
            try {
                const std::size_t ai = i / (qs.size() * as.size());
                const shooting::CauchyProblem prob{psis[ai], o.n, c.q, c.a};
                const auto t = shooting::integrate_cauchy(prob, o.rmax, opt);
                switch (t.event) {
                    case shooting::Event::first_zero: c.event = "zero-found"; break;
                    case shooting::Event::reached_r_max: c.event = "global-positive"; break;
                    case shooting::Event::blow_up: c.event = "blow-up"; break;
                    case shooting::Event::step_underflow: c.event = "step-underflow"; break;
                }
                const auto tr = diagnostics::pohozaev(t);
                c.monotone = diagnostics::min_increment(tr) >= -1e-8 ? 1 : 0;
            } catch (const std::exception&) {
                c.event = "error";
                c.monotone = 0;
            }
        }
    };
    unsigned pool = o.threads > 0 ? static_cast<unsigned>(o.threads)
                                  : std::max(1u, std::thread::hardware_concurrency());
    pool = std::min<std::size_t>(pool, cells.size());
    std::vector<std::thread> threads;
    for (unsigned k = 0; k + 1 < pool; ++k) threads.emplace_back(worker);
    worker();
    for (auto& th : threads) th.join();

    std::ofstream f(out / "sweep.csv");
    if (!f) throw std::runtime_error("cannot write sweep.csv");
    f << "alpha,q,a,event,pohozaev_monotone\n";
    std::size_t zero = 0, global = 0, blow = 0;
    for (const auto& c : cells) {
        f << io::format_double(c.alpha) << "," << io::format_double(c.q) << ","
          << io::format_double(c.a) << "," << c.event << "," << c.monotone << "\n";
        zero += c.event == "zero-found";
        global += c.event == "global-positive";
        blow += c.event == "blow-up";
    }
    std::cout << "cells = " << cells.size() << "\n";
    std::cout << "zero_found = " << zero << "\n";
    std::cout << "global_positive = " << global << "\n";
    std::cout << "blow_up = " << blow << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> raw(argv + 1, argv + argc);

    Opts o;
    try {
        apply_config(raw, o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    CLI::App app{"Lane-Emden equation laboratory on radial model manifolds"};
    app.add_option("--config", o.config, "JSON config file preseeding any long option");
    app.add_option("--out", o.out, "output directory");
    app.add_option("--profile", o.profile, "profile name or saved-profile JSON file");
    app.add_option("--n", o.n, "space dimension");
    app.add_option("--alpha", o.alpha, "polynomial growth rate of psi");
    auto* qopt = app.add_option("--q", o.q, "nonlinearity exponent");
    app.add_option("--a", o.a, "initial height u(0)");
    app.add_option("--rtol", o.rtol, "relative integration tolerance");
    app.add_option("--atol", o.atol, "absolute integration tolerance");
    app.add_option("--rmax", o.rmax, "maximal integration radius");
    app.add_option("--threads", o.threads, "worker threads (0 = logical cores)");
    app.add_option("--seed", o.seed, "seed recorded in the manifest");
    app.add_option("--samples", o.samples, "target stored samples per trajectory");
    app.add_flag("--past-zero", o.past_zero, "continue integration past the first zero");
    app.add_option("--f", o.f_name, "f-family member: arctan, tanh, saturating");
    app.add_option("--f-scale", o.f_scale, "saturation radius for f = saturating");
    app.add_option("--r-switch", o.r_switch, "linear_power switch radius");
    app.require_subcommand(1);

    auto* classify = app.add_subcommand("classify", "critical exponents and regime for (n, alpha, q)");
    auto* shoot = app.add_subcommand("shoot", "integrate one radial Cauchy problem");
    auto* pohozaev = app.add_subcommand("pohozaev", "energy/Pohozaev trace along one trajectory");
    auto* branch = app.add_subcommand("branch", "first-zero branch scan and non-uniqueness detection");
    auto* dirichlet = app.add_subcommand("dirichlet", "ball Dirichlet solution by shooting");
    auto* sobolev = app.add_subcommand("sobolev", "truncated Rayleigh quotient scan over R");
    auto* embed = app.add_subcommand("embed", "weighted Sobolev embedding verdict for exponent p");
    auto* glue = app.add_subcommand("glue", "build the glued manifold pipeline for (n, alpha, q)");
    auto* supersol = app.add_subcommand("supersol", "explicit radial supersolution for (n, alpha, q)");
    auto* sweep = app.add_subcommand("sweep", "event/monotonicity verdicts over an (alpha, q, a) grid");
    for (auto* sub : {classify, shoot, pohozaev, branch, dirichlet, sobolev, embed, glue, supersol, sweep})
        sub->fallthrough();

    branch->add_option("--a-min", o.a_min, "smallest shooting height");
    branch->add_option("--a-max", o.a_max, "largest shooting height");
    branch->add_option("--count", o.count, "number of branch points");
    dirichlet->add_option("--R", o.R, "ball radius");
    dirichlet->add_option("--a-lo", o.a_lo, "bisection bracket, lower height");
    dirichlet->add_option("--a-hi", o.a_hi, "bisection bracket, upper height");
    sobolev->add_option("--R", o.R_list, "radii to scan");
    sobolev->add_option("--mesh", o.mesh, "minimization mesh size");
    embed->add_option("--p", o.p, "target Lebesgue exponent")->required();
    embed->add_option("--r-lo", o.r_lo, "scan start radius");
    embed->add_option("--r-hi", o.r_hi, "scan end radius");
    embed->add_option("--per-decade", o.per_decade, "scan points per decade");
    supersol->add_option("--eps", o.eps, "tail-rate margin (0 = automatic)");
    sweep->add_option("--alpha-range", o.alpha_range, "alpha grid lo:hi:step or lo:hi:logN");
    sweep->add_option("--q-range", o.q_range, "q grid lo:hi:step or lo:hi:logN");
    sweep->add_option("--a-range", o.a_range, "height grid lo:hi:step or lo:hi:logN");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        if (rc == 0) return 0;
        // record the failed invocation when an output directory is recoverable
        const auto wall = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0);
        write_manifest(o.out, "parse-error", o, 1, "argument parsing failed", wall.count());
        return 1;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    const bool got_q = qopt->count() > 0 || o.cfg_has_q;

    int code = 0;
    std::string error;
    try {
        const fs::path out{o.out};
        fs::create_directories(out);
        if (cmd == "classify") run_classify(o, got_q);
        else if (cmd == "shoot") run_shoot(o, out);
        else if (cmd == "pohozaev") run_pohozaev(o, out);
        else if (cmd == "branch") run_branch(o, out);
        else if (cmd == "dirichlet") run_dirichlet(o, out);
        else if (cmd == "sobolev") run_sobolev(o, out);
        else if (cmd == "embed") run_embed(o, out);
        else if (cmd == "glue") run_glue(o, out);
        else if (cmd == "supersol") run_supersol(o, out);
        else if (cmd == "sweep") run_sweep(o, out);
    } catch (const std::invalid_argument& e) {
        code = 1;
        error = e.what();
    } catch (const std::runtime_error& e) {
        code = 2;
        error = e.what();
    } catch (const std::exception& e) {
        code = 3;
        error = e.what();
    }

    const auto wall = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0);
    try {
        write_manifest(o.out, cmd, o, code, error, wall.count());
    } catch (...) {
    }
    if (code != 0) std::cerr << "error: " << error << "\n";
    return code;
}
