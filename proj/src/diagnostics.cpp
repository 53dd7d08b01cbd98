#include "lem/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lem/fit.hpp"
#include "lem/quadrature.hpp"

namespace lem::diagnostics {

namespace {

// weighted three-point first derivative, exact for quadratics on any spacing
double dcentral(double fm, double f0, double fp, double h1, double h2) {
    return -h2 / (h1 * (h1 + h2)) * fm + (h2 - h1) / (h1 * h2) * f0 +
           h1 / (h2 * (h1 + h2)) * fp;
}

}  // namespace

PohozaevTrace pohozaev(const shooting::Trajectory& t) {
    if (t.r.size() < 2) throw std::invalid_argument("pohozaev: too few samples");
    const manifold::Profile& psi = *t.problem.psi;
    const int n = t.problem.n;
    const double q = t.problem.q;

    PohozaevTrace tr;
    tr.n = n;
    tr.q = q;
    tr.r = t.r;
    auto wt = [&](double s) { return std::pow(psi.eval(s).psi, n - 1); };
    double head = quadrature::integrate(wt, 0.0, t.r.front(), 1e-12);
    tr.cumvol = quadrature::cumulative(wt, t.r, head);

    std::size_t m = t.r.size();
    tr.F.resize(m);
    tr.P.resize(m);
    tr.rate.resize(m);
    tr.du2.resize(m);
    double bound = 0.5 + 1.0 / (q + 1.0);
    for (std::size_t i = 0; i < m; ++i) {
        double u = t.u[i], du = t.du[i], r = t.r[i];
        manifold::Jet j = psi.eval(r);
        double w = std::pow(j.psi, n - 1);
        tr.du2[i] = du * du;
        tr.F[i] = 0.5 * du * du + std::pow(std::abs(u), q + 1.0) / (q + 1.0);
        tr.P[i] = tr.cumvol[i] * tr.F[i] + w * u * du / (q + 1.0);
        tr.rate[i] = w * (bound - (n - 1) * j.dpsi * tr.cumvol[i] / std::pow(j.psi, n));
    }
    return tr;
}

double rate_identity(const PohozaevTrace& tr) {
    if (tr.r.size() < 9) throw std::invalid_argument("rate_identity: needs >= 9 points");
    double pmax = 0;
    for (double p : tr.P) pmax = std::max(pmax, std::abs(p));
    double scale = std::max(1.0, pmax), worst = 0;
    for (std::size_t i = 1; i + 1 < tr.r.size(); ++i) {
        double h1 = tr.r[i] - tr.r[i - 1], h2 = tr.r[i + 1] - tr.r[i];
        double dP = dcentral(tr.P[i - 1], tr.P[i], tr.P[i + 1], h1, h2);
        worst = std::max(worst, std::abs(dP - tr.rate[i] * tr.du2[i]) / scale);
    }
    return worst;
}

double min_increment(const PohozaevTrace& tr) {
    if (tr.P.size() < 2) throw std::invalid_argument("min_increment: needs >= 2 points");
    double pmax = 0;
    for (double p : tr.P) pmax = std::max(pmax, std::abs(p));
    if (pmax == 0) return 0;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < tr.P.size(); ++i)
        worst = std::min(worst, (tr.P[i + 1] - tr.P[i]) / pmax);
    return worst;
}

AmplitudeLimit amplitude_limit(const shooting::Trajectory& t, double alpha) {
    const manifold::Profile& psi = *t.problem.psi;
    if (psi.growth() == manifold::Growth::exponential)
        throw std::invalid_argument("amplitude_limit: profile grows exponentially, no power tail");
    if (alpha <= 0) {
        auto pa = psi.alpha();
        if (!pa) throw std::invalid_argument("amplitude_limit: no alpha declared or supplied");
        alpha = *pa;
    }
    const int n = t.problem.n;
    double beta = alpha * (n - 1);
    double eu = 0.5 * (beta - 1.0), edu = 0.5 * (beta + 1.0);

    double r_back = t.r.back(), r_lo = 0.25 * r_back;
    std::vector<double> su, sdu;
    for (std::size_t i = 0; i < t.r.size(); ++i) {
        if (t.r[i] < r_lo) continue;
        if (!(t.u[i] > 0))
            throw std::runtime_error("amplitude_limit: u is not positive on the tail window");
        su.push_back(std::pow(t.r[i], eu) * t.u[i]);
        if (t.du[i] != 0) sdu.push_back(std::pow(t.r[i], edu) * std::abs(t.du[i]));
    }
    if (su.size() < 16 || sdu.size() < 16)
        throw std::runtime_error("amplitude_limit: tail window holds too few samples");

    AmplitudeLimit out;
    out.L = fit::trimmed_geomean(su);
    out.Lprime = fit::trimmed_geomean(sdu);
    out.tail_samples = static_cast<int>(su.size());
    double ex = manifold::critical_exponents(n, alpha).two_star_alpha - 2.0;
    out.relation_residual = std::abs(std::pow(out.L, ex) - eu * eu);
    return out;
}

SummandDecay summand_decay(const PohozaevTrace& tr, const shooting::Trajectory& t,
                           double alpha, double r_lo, double r_hi) {
    if (tr.r.size() != t.r.size())
        throw std::invalid_argument("summand_decay: trace and trajectory grids differ");
    const manifold::Profile& psi = *t.problem.psi;
    std::vector<double> xs, kin, pot, bnd;
    for (std::size_t i = 0; i < tr.r.size(); ++i) {
        double r = tr.r[i];
        if (r < r_lo || r > r_hi) continue;
        double w = std::pow(psi.eval(r).psi, tr.n - 1);
        double k = tr.cumvol[i] * 0.5 * tr.du2[i];
        double p = tr.cumvol[i] * std::pow(std::abs(t.u[i]), tr.q + 1.0) / (tr.q + 1.0);
        double b = std::abs(w * t.u[i] * t.du[i] / (tr.q + 1.0));
        if (!(k > 0) || !(p > 0) || !(b > 0)) continue;
        xs.push_back(r);
        kin.push_back(k);
        pot.push_back(p);
        bnd.push_back(b);
    }
    if (xs.size() < 8) throw std::invalid_argument("summand_decay: window holds too few samples");
    SummandDecay out;
    out.e_kinetic = fit::loglog(xs, kin).slope;
    out.e_potential = fit::loglog(xs, pot).slope;
    out.e_boundary = fit::loglog(xs, bnd).slope;
    out.predicted = alpha * (t.problem.n - 1) + 1.0 - 2.0 * (tr.q + 1.0) / (tr.q - 1.0);
    return out;
}

}  // namespace lem::diagnostics
