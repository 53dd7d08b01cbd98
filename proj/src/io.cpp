#include "lem/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace lem::io {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot open for writing: " + p.string());
    return f;
}

std::ifstream open_in(const std::filesystem::path& p) {
    std::ifstream f(p);
    if (!f) throw std::runtime_error("cannot open for reading: " + p.string());
    return f;
}

json params_json(const manifold::Profile& p) {
    json out = json::object();
    for (const auto& [k, v] : p.params()) out[k] = v;
    return out;
}

// resampling grid for serializing profiles without an accessible node list
std::vector<double> sample_grid(double r_max) {
    std::vector<double> g{0.0};
    double dense_end = std::min(8.0, r_max);
    int nd = (int)std::ceil(dense_end / 2e-3);
    for (int i = 1; i <= nd; ++i) g.push_back(dense_end * i / (double)nd);
    if (r_max > dense_end * (1.0 + 1e-12)) {
        double decades = std::log10(r_max / dense_end);
        int m = (int)std::ceil(decades * 256);
        for (int i = 1; i <= m; ++i)
            g.push_back(dense_end * std::pow(10.0, decades * i / (double)m));
        g.back() = r_max;
    }
    return g;
}

void parse_tabulated_csv(const std::filesystem::path& csv, std::vector<double>& r,
                         std::vector<double>& psi, std::vector<double>& dpsi,
                         std::vector<double>& ddpsi) {
    auto f = open_in(csv);
    std::string line;
    if (!std::getline(f, line) || line != "r,psi,dpsi,ddpsi")
        throw std::runtime_error("bad tabulated CSV header in " + csv.string());
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        double a, b, c, d;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &a, &b, &c, &d) != 4)
            throw std::runtime_error("bad tabulated CSV row in " + csv.string());
        r.push_back(a);
        psi.push_back(b);
        dpsi.push_back(c);
        ddpsi.push_back(d);
    }
    if (r.size() < 2) throw std::runtime_error("tabulated CSV too short: " + csv.string());
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trajectory(const std::filesystem::path& csv, const shooting::Trajectory& t) {
    auto f = open_out(csv);
    f << "r,u,du\n";
    for (std::size_t i = 0; i < t.r.size(); ++i)
        f << format_double(t.r[i]) << ',' << format_double(t.u[i]) << ','
          << format_double(t.du[i]) << '\n';

    json j;
    j["event"] = shooting::event_name(t.event);
    j["r_event"] = t.r_event;
    j["problem"] = {{"family", manifold::family_name(t.problem.psi->family())},
                    {"params", params_json(*t.problem.psi)},
                    {"n", t.problem.n},
                    {"q", t.problem.q},
                    {"a", t.problem.a}};
    j["tolerances"] = {{"rtol", t.rtol}, {"atol", t.atol}};
    std::filesystem::path side = csv;
    side.replace_extension(".json");
    open_out(side) << j.dump(2) << '\n';
}

void write_trace(const std::filesystem::path& csv, const diagnostics::PohozaevTrace& tr) {
    auto f = open_out(csv);
    f << "r,F,P,rate\n";
    for (std::size_t i = 0; i < tr.r.size(); ++i)
        f << format_double(tr.r[i]) << ',' << format_double(tr.F[i]) << ','
          << format_double(tr.P[i]) << ',' << format_double(tr.rate[i]) << '\n';
}

void write_branch(const std::filesystem::path& csv, const dirichlet::DirichletBranch& b) {
    auto f = open_out(csv);
    f << "a,rho,u0_check\n";
    for (const auto& p : b.points)
        f << format_double(p.a) << ',' << (p.rho ? format_double(*p.rho) : "inf") << ','
          << format_double(p.u0_check) << '\n';
}

void write_nonuniq(const std::filesystem::path& path,
                   const std::vector<dirichlet::NonUniqTriple>& triples) {
    json j = json::array();
    for (const auto& t : triples) j.push_back({{"R", t.R}, {"a1", t.a1}, {"a2", t.a2}});
    open_out(path) << j.dump(2) << '\n';
}

void write_scan(const std::filesystem::path& csv, const sobolev::ScanResult& scan) {
    auto f = open_out(csv);
    f << "R,I_R,mass,iterations,converged\n";
    for (const auto& row : scan.rows)
        f << format_double(row.R) << ',' << format_double(row.I_R) << ','
          << format_double(row.mass) << ',' << row.iterations << ','
          << (row.converged ? 1 : 0) << '\n';
}

void save_profile(const std::filesystem::path& json_file, const manifold::Profile& p,
                  double validation_r_max, double validation_tol) {
    json j;
    j["family"] = manifold::family_name(p.family());
    j["params"] = params_json(p);
    auto tp = p.text_params();
    if (!tp.empty()) {
        json t = json::object();
        for (const auto& [k, v] : tp) t[k] = v;
        j["text_params"] = t;
    }
    j["validation"] = {{"r_max", validation_r_max}, {"tol", validation_tol}};
    if (p.family() == manifold::Family::tabulated) {
        std::filesystem::path data = json_file;
        data.replace_extension(".csv");
        auto pm = p.params();
        double rmax = pm.count("r_max") ? pm.at("r_max") : validation_r_max;
        write_tabulated_csv(data, p, sample_grid(rmax));
        j["data"] = data.filename().string();
    }
    open_out(json_file) << j.dump(2) << '\n';
}

manifold::ProfilePtr load_profile(const std::filesystem::path& json_file) {
    json j;
    open_in(json_file) >> j;
    auto fam = manifold::family_from_name(j.at("family").get<std::string>());
    json P = j.value("params", json::object());
    auto getp = [&P](const char* k) { return P.at(k).get<double>(); };

    manifold::ProfilePtr p;
    switch (fam) {
        case manifold::Family::euclidean: p = manifold::make_euclidean(); break;
        case manifold::Family::hyperbolic: p = manifold::make_hyperbolic(); break;
        case manifold::Family::shifted_power:
            p = manifold::make_shifted_power(getp("alpha"));
            break;
        case manifold::Family::arctan_family:
            p = manifold::make_arctan_profile(getp("alpha"));
            break;
        case manifold::Family::f_family: {
            std::string fn = j.at("text_params").at("f").get<std::string>();
            double fs = P.contains("f_scale") ? getp("f_scale") : 1.0;
            p = manifold::make_f_profile(getp("alpha"), fn, fs);
            break;
        }
        case manifold::Family::piecewise_sinh_power:
            p = manifold::make_piecewise_sinh_power(getp("alpha"), getp("r_bar"),
                                                    getp("r_tilde"), getp("kappa"));
            break;
        case manifold::Family::comparison:
            // two shapes share the tag: the exponent-blend profile carries
            // r_switch, the curvature-matched one carries (Q, r_o, K)
            if (P.contains("r_switch"))
                p = manifold::make_linear_power(getp("alpha"), getp("r_switch"));
            else
                p = manifold::make_comparison(getp("Q"), getp("r_o"), getp("K")).profile;
            break;
        case manifold::Family::tabulated: {
            auto data = json_file.parent_path() / j.at("data").get<std::string>();
            std::vector<double> r, psi, dpsi, ddpsi;
            parse_tabulated_csv(data, r, psi, dpsi, ddpsi);
            std::optional<double> alpha, kappa;
            if (P.contains("alpha")) alpha = getp("alpha");
            if (P.contains("kappa")) kappa = getp("kappa");
            p = manifold::make_tabulated(std::move(r), std::move(psi), std::move(dpsi),
                                         std::move(ddpsi), alpha, kappa);
            break;
        }
    }
    if (!p) throw std::runtime_error("load_profile: unsupported family");

    if (j.contains("validation")) {
        double rmax = j["validation"].value("r_max", 1e4);
        double tol = j["validation"].value("tol", 1e-6);
        auto rep = manifold::validate_profile(*p, rmax, tol);
        if (!rep.pole_ok || !rep.positive_ok)
            throw std::runtime_error("load_profile: profile fails validation (pole defect "
                                     + std::to_string(rep.pole_defect) + ")");
    }
    return p;
}

void write_tabulated_csv(const std::filesystem::path& csv, const manifold::Profile& p,
                         const std::vector<double>& grid) {
    auto f = open_out(csv);
    f << "r,psi,dpsi,ddpsi\n";
    for (double r : grid) {
        auto jet = p.eval(r);
        f << format_double(r) << ',' << format_double(jet.psi) << ','
          << format_double(jet.dpsi) << ',' << format_double(jet.ddpsi) << '\n';
    }
}

manifold::ProfilePtr read_tabulated_csv(const std::filesystem::path& csv) {
    std::vector<double> r, psi, dpsi, ddpsi;
    parse_tabulated_csv(csv, r, psi, dpsi, ddpsi);
    return manifold::make_tabulated(std::move(r), std::move(psi), std::move(dpsi),
                                    std::move(ddpsi));
}

void save_glued(const std::filesystem::path& dir, const constructions::GluedArtifact& g) {
    std::filesystem::create_directories(dir);
    const auto& s = g.final;

    write_tabulated_csv(dir / "psi.csv", *g.psi_final, sample_grid(1e4));

    {
        auto f = open_out(dir / "u.csv");
        f << "r,u,du\n";
        for (double r : sample_grid(1e4))
            f << format_double(r) << ',' << format_double(s.u(r)) << ','
              << format_double(s.du(r)) << '\n';
    }

    json meta;
    meta["n"] = s.n;
    meta["alpha"] = s.alpha;
    meta["q"] = s.q;
    meta["r_tilde"] = s.r_tilde;
    meta["r_bar"] = s.r_bar;
    meta["kappa"] = g.lip.kappa;
    meta["c"] = g.lip.c;
    meta["A"] = s.A;
    meta["B"] = s.B;
    meta["C"] = s.C;
    meta["A_tilde"] = s.A_tilde;
    meta["eps"] = s.eps;
    meta["width"] = s.width;
    meta["K"] = s.K;
    meta["min_G"] = s.min_G;
    meta["kappa_tail"] = s.kappa_tail;
    meta["a_ball"] = g.lip.a_ball;
    open_out(dir / "meta.json") << meta.dump(2) << '\n';
}

}  // namespace lem::io
