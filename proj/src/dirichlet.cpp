#include "lem/dirichlet.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "lem/quadrature.hpp"
#include "lem/sobolev.hpp"

namespace lem::dirichlet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double rho_eff(const manifold::ProfilePtr& psi, int n, double q, double a, double r_max,
               const shooting::Options& opt) {
    auto z = shooting::first_zero({psi, n, q, a}, r_max, opt);
    return z ? *z : kInf;
}

// bisect rho(a) = R inside [a_lo, a_hi] where rho - R changes sign
double bisect_height(const manifold::ProfilePtr& psi, int n, double q, double R,
                     double a_lo, double a_hi, double s_lo, double r_max,
                     const shooting::Options& opt, double rho_tol) {
    double mid = 0.5 * (a_lo + a_hi);
    for (int it = 0; it < 80 && a_hi - a_lo > 1e-13 * a_hi; ++it) {
        mid = 0.5 * (a_lo + a_hi);
        double s = rho_eff(psi, n, q, mid, r_max, opt) - R;
        if (std::abs(s) < rho_tol) return mid;
        if ((s > 0) == (s_lo > 0)) {
            a_lo = mid;
            s_lo = s;
        } else {
            a_hi = mid;
        }
    }
    return mid;
}

}  // namespace

DirichletBranch branch_trace(manifold::ProfilePtr psi, int n, double q,
                             double a_min, double a_max, int count, double r_max,
                             const shooting::Options& opt, int threads) {
    if (!(0 < a_min && a_min < a_max) || count < 2)
        throw std::invalid_argument("branch_trace: need 0 < a_min < a_max and count >= 2");
    DirichletBranch br;
    br.psi = psi;
    br.n = n;
    br.q = q;
    br.r_max = r_max;
    br.options = opt;
    br.points.resize(count);

    std::vector<double> heights(count);
    double llo = std::log(a_min), lhi = std::log(a_max);
    for (int i = 0; i < count; ++i) heights[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
    heights.front() = a_min;
    heights.back() = a_max;

    int nt = threads > 0 ? threads : int(std::thread::hardware_concurrency());
    nt = std::clamp(nt, 1, count);
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                shooting::Trajectory t = shooting::integrate_cauchy({psi, n, q, heights[i]},
                                                                    r_max, opt);
                BranchPoint pt;
                pt.a = heights[i];
                pt.event = t.event;
                if (t.event == shooting::Event::first_zero) {
                    pt.rho = t.r_event;
                    pt.u0_check = std::abs(t.u.back()) / heights[i];
                }
                br.points[i] = pt;
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (err) std::rethrow_exception(err);

    for (int i = 0; i < count; ++i)
        for (int j = i + 1; j < count; ++j) {
            double ri = br.points[i].rho ? *br.points[i].rho : kInf;
            double rj = br.points[j].rho ? *br.points[j].rho : kInf;
            if (ri < rj) br.monotone_violations.emplace_back(i, j);
        }
    return br;
}

std::vector<NonUniqTriple> detect_nonuniqueness(const DirichletBranch& branch,
                                                bool* bracket_warning) {
    const auto& P = branch.points;
    bool warn = false;
    std::vector<NonUniqTriple> out;
    int attempts = 0;

    for (const auto& [i, j] : branch.monotone_violations) {
        if (out.size() >= 8 || attempts >= 64) break;
        if (!P[i].rho || !P[j].rho) {
            warn = true;  // violation rests on an absent entry: no finite bracket
            continue;
        }
        if (j < i + 2) continue;  // want genuinely separated grid segments
        double Rstar = 0.5 * (*P[i].rho + *P[j].rho);
        bool dup = false;
        for (const auto& tr : out)
            if (std::abs(tr.R - Rstar) <= 1e-3 * Rstar) dup = true;
        if (dup) continue;

        std::vector<std::pair<int, int>> brackets;
        for (std::size_t k = 0; k + 1 < P.size(); ++k) {
            double s0 = (P[k].rho ? *P[k].rho : kInf) - Rstar;
            double s1 = (P[k + 1].rho ? *P[k + 1].rho : kInf) - Rstar;
            if ((s0 > 0) == (s1 > 0)) continue;
            if (!P[k].rho || !P[k + 1].rho) {
                warn = true;
                continue;
            }
            brackets.emplace_back(int(k), int(k + 1));
        }
        if (brackets.size() < 2 || brackets.back().first < brackets.front().second) continue;
        ++attempts;

        double tol = 1e-9 * std::max(1.0, Rstar);
        auto solve = [&](std::pair<int, int> b) {
            return bisect_height(branch.psi, branch.n, branch.q, Rstar, P[b.first].a,
                                 P[b.second].a, *P[b.first].rho - Rstar, branch.r_max,
                                 branch.options, tol);
        };
        NonUniqTriple trip;
        trip.R = Rstar;
        trip.a1 = solve(brackets.front());
        trip.a2 = solve(brackets.back());
        if (trip.a1 > trip.a2) std::swap(trip.a1, trip.a2);
        double rho1 = rho_eff(branch.psi, branch.n, branch.q, trip.a1, branch.r_max,
                              branch.options);
        double rho2 = rho_eff(branch.psi, branch.n, branch.q, trip.a2, branch.r_max,
                              branch.options);
        if (std::abs(rho1 - rho2) < 1e-8 * std::max(1.0, Rstar)) out.push_back(trip);
    }
    if (bracket_warning) *bracket_warning = warn;
    return out;
}

BallSolution dirichlet_solution(manifold::ProfilePtr psi, int n, double q, double R,
                                double a_lo, double a_hi, const shooting::Options& opt) {
    if (!(0 < a_lo && a_lo < a_hi) || !(R > 0))
        throw std::invalid_argument("dirichlet_solution: need 0 < a_lo < a_hi and R > 0");
    double r_max = 4.0 * R + 10.0;
    double s_lo = rho_eff(psi, n, q, a_lo, r_max, opt) - R;
    double s_hi = rho_eff(psi, n, q, a_hi, r_max, opt) - R;
    if ((s_lo > 0) == (s_hi > 0))
        throw std::invalid_argument("dirichlet_solution: [a_lo, a_hi] does not bracket rho = R");

    double a = bisect_height(psi, n, q, R, a_lo, a_hi, s_lo, r_max, opt, 1e-10 * R);
    BallSolution sol;
    sol.R = R;
    sol.a = a;
    sol.trajectory = shooting::integrate_cauchy({psi, n, q, a}, r_max, opt);
    if (sol.trajectory.event != shooting::Event::first_zero)
        throw std::runtime_error("dirichlet_solution: refined height lost the zero crossing");
    if (std::abs(sol.trajectory.r_event - R) > 1e-8 * R)
        throw std::runtime_error("dirichlet_solution: bisection failed to reach rho = R");
    sol.zero_residual = std::abs(sol.trajectory.u.back()) / a;

    const shooting::Trajectory& t = sol.trajectory;
    const manifold::Profile& pr = *psi;
    auto wt = [&](double s) { return std::pow(pr.eval(s).psi, n - 1); };
    auto fm = [&](double s) { return std::pow(std::abs(t.u_at(s)), q + 1.0) * wt(s); };
    auto fe = [&](double s) { double d = t.du_at(s); return d * d * wt(s); };
    double mass = quadrature::integrate(fm, 0.0, t.r.front(), 1e-10) +
                  quadrature::cumulative(fm, t.r).back();
    double energy = quadrature::integrate(fe, 0.0, t.r.front(), 1e-10) +
                    quadrature::cumulative(fe, t.r).back();
    sol.mass = mass;
    sol.sobolev_quotient = std::sqrt(energy) * std::pow(mass, -1.0 / (q + 1.0));
    return sol;
}

ClaimsReport branch_claims_report(manifold::ProfilePtr psi, int n, double q,
                                  const std::vector<double>& R_list, double a_min,
                                  double a_max, int scan_count, int mesh_size,
                                  const shooting::Options& opt) {
    if (R_list.empty()) throw std::invalid_argument("branch_claims_report: empty R list");
    for (std::size_t k = 0; k + 1 < R_list.size(); ++k)
        if (!(R_list[k] < R_list[k + 1]))
            throw std::invalid_argument("branch_claims_report: R_list must be ascending");

    double r_max = 4.0 * R_list.back() + 10.0;
    DirichletBranch br = branch_trace(psi, n, q, a_min, a_max, scan_count, r_max, opt);

    ClaimsReport rep;
    char buf[160];
    for (double R : R_list) {
        ClaimsRow row;
        row.R = R;
        row.I_R = sobolev::rayleigh_minimize(*psi, n, q, R, mesh_size).I_R;

        std::vector<std::pair<int, int>> brackets;
        for (int k = 0; k + 1 < int(br.points.size()); ++k) {
            double s0 = (br.points[k].rho ? *br.points[k].rho : kInf) - R;
            double s1 = (br.points[k + 1].rho ? *br.points[k + 1].rho : kInf) - R;
            if ((s0 > 0) != (s1 > 0)) brackets.emplace_back(k, k + 1);
        }
        row.root_count = int(brackets.size());
        if (brackets.empty()) {
            row.A_R = std::numeric_limits<double>::quiet_NaN();
            std::snprintf(buf, sizeof buf, "no branch root for R=%g on the scan grid", R);
            rep.violations.push_back(buf);
        } else {
            auto [k0, k1] = brackets.front();
            if (!br.points[k0].rho || !br.points[k1].rho) {
                row.A_R = std::numeric_limits<double>::quiet_NaN();
                std::snprintf(buf, sizeof buf,
                              "first root bracket for R=%g touches an absent entry", R);
                rep.violations.push_back(buf);
            } else {
                BallSolution sol = dirichlet_solution(psi, n, q, R, br.points[k0].a,
                                                      br.points[k1].a, opt);
                row.A_R = sol.a;
                row.mass = sol.mass;
            }
        }
        rep.rows.push_back(row);
    }

    rep.I_nonincreasing = true;
    rep.A_decreasing = true;
    for (std::size_t k = 0; k + 1 < rep.rows.size(); ++k) {
        const auto& r0 = rep.rows[k];
        const auto& r1 = rep.rows[k + 1];
        if (r1.I_R > r0.I_R * (1.0 + 1e-9)) {
            rep.I_nonincreasing = false;
            std::snprintf(buf, sizeof buf, "I_R increases from R=%g to R=%g", r0.R, r1.R);
            rep.violations.push_back(buf);
        }
        if (std::isnan(r0.A_R) || std::isnan(r1.A_R) || !(r1.A_R < r0.A_R)) {
            rep.A_decreasing = false;
            std::snprintf(buf, sizeof buf, "A(R) fails to decrease from R=%g to R=%g",
                          r0.R, r1.R);
            rep.violations.push_back(buf);
        }
        if (r1.root_count > 1 || r0.root_count > 1) rep.multivalued = true;
    }
    if (rep.rows.size() == 1 && rep.rows[0].root_count > 1) rep.multivalued = true;
    return rep;
}

}  // namespace lem::dirichlet
