#include "lem/sobolev.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "lem/fit.hpp"
#include "lem/kernels.hpp"
#include "lem/quadrature.hpp"

namespace lem::sobolev {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double head_integral(const manifold::Profile& p, int n, double r) {
    return quadrature::integrate([&](double s) { return std::pow(p.eval(s).psi, n - 1); },
                                 0.0, r, 1e-11);
}

// int_r^inf psi^(1-n); +inf when the power tail diverges
double tail_integral(const manifold::Profile& p, int n, double r) {
    auto f = [&](double s) { return std::pow(p.eval(s).psi, 1.0 - n); };
    if (p.growth() == manifold::Growth::exponential)
        return quadrature::integrate(f, r, r + 60.0, 1e-11);
    auto alpha = p.alpha();
    auto kappa = p.kappa();
    if (!alpha || !kappa || *alpha * (n - 1) <= 1.0) return kInf;
    double R = std::max(1e4, 2.0 * r);
    return quadrature::integrate(f, r, R, 1e-11) + quadrature::power_tail(*kappa, *alpha, n, R);
}

double phi(double u, double qp1) { return std::pow(std::abs(u), qp1); }
double dphi(double u, double qp1) { return qp1 * u * std::pow(std::abs(u), qp1 - 2.0); }

// symmetric sinh-graded mesh on [0, R]: cells shrink ~6x toward both ends
std::vector<double> graded_mesh(double R, int M) {
    std::vector<double> x(M + 1);
    const double g = 2.5, s = std::sinh(g);
    for (int i = 0; i <= M; ++i) {
        double t = 2.0 * i / M - 1.0;
        x[i] = R * (std::asinh(s * t) + g) / (2.0 * g);
    }
    x.front() = 0.0;
    x.back() = R;
    return x;
}

// 5-point Gauss-Legendre on [a, b]
template <typename F>
double gl5(const F& f, double a, double b) {
    static const double t[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                0.5384693101056831, 0.9061798459386640};
    static const double w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                0.4786286704993665, 0.2369268850561891};
    double c = 0.5 * (a + b), h = 0.5 * (b - a), acc = 0;
    for (int i = 0; i < 5; ++i) acc += w[i] * f(c + h * t[i]);
    return acc * h;
}

struct Discretization {
    int n, M;
    double q, qp1, R;
    std::vector<double> x, h;          // nodes, cell widths
    std::vector<double> wN;            // cell weight for |f'|^2: int psi^{n-1} / h^2
    std::vector<double> cnode, cmid;   // Simpson mass weights at nodes / midpoints

    Discretization(const manifold::Profile& p, int n_, double q_, double R_, int M_)
        : n(n_), M(M_), q(q_), qp1(q_ + 1.0), R(R_) {
        x = graded_mesh(R, M);
        h.resize(M);
        wN.resize(M);
        cnode.assign(M + 1, 0.0);
        cmid.resize(M);
        auto w = [&](double s) { return std::pow(p.eval(s).psi, n - 1); };
        for (int i = 0; i < M; ++i) {
            h[i] = x[i + 1] - x[i];
            double wl = w(x[i]), wm = w(0.5 * (x[i] + x[i + 1])), wr = w(x[i + 1]);
            wN[i] = h[i] / 6.0 * (wl + 4.0 * wm + wr) / (h[i] * h[i]);
            cnode[i] += h[i] / 6.0 * wl;
            cnode[i + 1] += h[i] / 6.0 * wr;
            cmid[i] = 2.0 / 3.0 * h[i] * wm;
        }
    }

    double energy(const std::vector<double>& f) const {
        return kernels::weighted_diff_sq_sum(f.data(), wN.data(), M);
    }
    double mass_q(const std::vector<double>& f, std::vector<double>& mid) const {
        kernels::axpby(0.5, f.data(), 0.5, f.data() + 1, mid.data(), M);
        return kernels::pow_mass(f.data(), cnode.data(), M + 1, qp1) +
               kernels::pow_mass(mid.data(), cmid.data(), M, qp1);
    }
    double J(const std::vector<double>& f, std::vector<double>& mid, double* Nout = nullptr,
             double* Dout = nullptr) const {
        double N = energy(f), D = mass_q(f, mid);
        if (Nout) *Nout = N;
        if (Dout) *Dout = D;
        if (!(D > 0)) return kInf;
        return N * std::pow(D, -2.0 / qp1);
    }
    // consistent load vector b_k = <phi_k, |f|^{q-1} f>_psi on the P1 mesh
    void load(const std::vector<double>& f, const std::vector<double>& mid,
              std::vector<double>& b) const {
        auto s = [&](double u) { return std::abs(std::pow(std::abs(u), q - 1.0)) * u; };
        for (int k = 0; k <= M; ++k) {
            double v = cnode[k] * s(f[k]);
            if (k > 0) v += 0.5 * cmid[k - 1] * s(mid[k - 1]);
            if (k < M) v += 0.5 * cmid[k] * s(mid[k]);
            b[k] = v;
        }
    }
    // solve the SPD tridiagonal system A g = b with g[M] = 0, where f'Af is
    // exactly energy(f); the fixed point A f = b(f) then has energy = mass,
    // the unit-multiplier normalization of the EL equation
    void solve_stiffness(const std::vector<double>& b, std::vector<double>& g,
                         std::vector<double>& cp, std::vector<double>& dp) const {
        for (int k = 0; k < M; ++k) {
            double diag = (k > 0 ? wN[k - 1] : 0.0) + wN[k];
            double lower = (k > 0) ? -wN[k - 1] : 0.0;
            double denom = diag - lower * (k > 0 ? cp[k - 1] : 0.0);
            cp[k] = -wN[k] / denom;
            dp[k] = (b[k] - lower * (k > 0 ? dp[k - 1] : 0.0)) / denom;
        }
        g[M] = 0.0;
        for (int k = M - 1; k >= 0; --k) g[k] = dp[k] - cp[k] * (k < M - 1 ? g[k + 1] : 0.0);
    }
};

struct DescentOutcome {
    std::vector<double> f;
    double J = kInf, N = 0, D = 0;
    int iterations = 0;
    bool converged = false;
};

// fixed-point iteration with the stabilizing power gamma = q/(q-1): each step
// solves the exact stiffness system, so mesh grading cannot stall the descent;
// the fixed point solves the Euler-Lagrange equation with unit multiplier
DescentOutcome petviashvili(const Discretization& d, std::vector<double> f) {
    const int M = d.M;
    const double gamma = d.q / (d.q - 1.0);
    f[M] = 0.0;
    kernels::abs_inplace(f.data(), f.size());
    std::vector<double> mid(M), b(M + 1), g(M + 1), cp(M), dp(M);

    DescentOutcome out;
    constexpr int kMaxIter = 500;
    int it = 0;
    for (; it < kMaxIter; ++it) {
        double N = d.energy(f), D = d.mass_q(f, mid);
        if (!(D > 0) || !std::isfinite(N))
            throw std::runtime_error("rayleigh_minimize: iterate collapsed");
        d.load(f, mid, b);
        double S = N / D;
        d.solve_stiffness(b, g, cp, dp);
        double scale = std::pow(S, gamma);
        double delta = 0, fmax = 0;
        for (int k = 0; k <= M; ++k) {
            double fn = scale * g[k];
            delta = std::max(delta, std::abs(fn - f[k]));
            fmax = std::max(fmax, std::abs(fn));
            f[k] = fn;
        }
        if (delta < 1e-13 * std::max(1.0, fmax) && std::abs(S - 1.0) < 1e-8) {
            out.converged = true;
            ++it;
            break;
        }
    }
    out.iterations = it;
    out.J = d.J(f, mid, &out.N, &out.D);
    out.f = std::move(f);
    return out;
}

QuotientResult minimize_impl(const manifold::Profile& p, int n, double q, double R, int M) {
    if (n < 2 || !(q > 1.0) || !(R > 0) || M < 16)
        throw std::invalid_argument("rayleigh_minimize: need n >= 2, q > 1, R > 0, mesh >= 16");
    Discretization d(p, n, q, R, M);

    std::vector<std::vector<double>> seeds(2, std::vector<double>(M + 1));
    for (int k = 0; k <= M; ++k) {
        double t = d.x[k] / R;
        seeds[0][k] = 1.0 - t * t;                                   // bump at the origin
        seeds[1][k] = std::min(1.0, (1.0 - t) / 0.2);                // plateau with taper
    }
    DescentOutcome best;
    for (auto& s : seeds) {
        DescentOutcome o = petviashvili(d, std::move(s));
        if (o.J < best.J) best = std::move(o);
    }
    if (!(best.D > 0) || !std::isfinite(best.J))
        throw std::runtime_error("rayleigh_minimize: descent collapsed to zero mass");

    QuotientResult out;
    out.R = R;
    out.I_R = std::sqrt(best.N) * std::pow(best.D, -1.0 / (q + 1.0));
    out.grid = d.x;
    out.iterations = best.iterations;
    out.converged = best.converged;

    // rescale so the minimizer solves the EL equation with unit multiplier
    double c = std::pow(best.N / best.D, 1.0 / (q - 1.0));
    out.minimizer = std::move(best.f);
    kernels::scale(c, out.minimizer.data(), out.minimizer.size());

    // independent mass quadrature over the piecewise-linear minimizer
    double mass = 0;
    for (int i = 0; i < M; ++i) {
        double f0 = out.minimizer[i], f1 = out.minimizer[i + 1];
        double x0 = d.x[i], x1 = d.x[i + 1];
        mass += gl5(
            [&](double s) {
                double t = (s - x0) / (x1 - x0);
                double u = f0 + (f1 - f0) * t;
                return phi(u, q + 1.0) * std::pow(p.eval(s).psi, n - 1);
            },
            x0, x1);
    }
    out.mass = mass;
    return out;
}

// pure power weight kappa * r^alpha used as the flat-model comparator; only
// the Jet is ever queried on (0, R]
class PurePower final : public manifold::Profile {
  public:
    PurePower(double alpha, double kappa) : a_(alpha), k_(kappa) {}
    manifold::Jet eval(double r) const override {
        double s = k_ * std::pow(r, a_);
        return {s, a_ * s / std::max(r, 1e-300), a_ * (a_ - 1.0) * s / std::max(r * r, 1e-300)};
    }
    manifold::Family family() const override { return manifold::Family::comparison; }
    std::optional<double> alpha() const override { return a_; }
    std::optional<double> kappa() const override { return k_; }

  private:
    double a_, k_;
};

}  // namespace

double ko_functional(const manifold::Profile& p, int n, double pexp, double r) {
    if (n < 2 || !(pexp > 0) || !(r > 0))
        throw std::invalid_argument("ko_functional: need n >= 2, p > 0, r > 0");
    double tail = tail_integral(p, n, r);
    if (!std::isfinite(tail)) return kInf;
    return std::pow(head_integral(p, n, r), 1.0 / pexp) * std::sqrt(tail);
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::continuous_and_compact: return "continuous_and_compact";
        case Verdict::continuous_not_compact: return "continuous_not_compact";
        case Verdict::not_continuous: return "not_continuous";
    }
    throw std::invalid_argument("verdict_name: bad enum value");
}

EmbeddingReport embedding_report(const manifold::Profile& p, int n, double pexp,
                                 double r_lo, double r_hi, int per_decade) {
    if (!(0 < r_lo && r_lo < r_hi) || per_decade < 4)
        throw std::invalid_argument("embedding_report: need 0 < r_lo < r_hi, per_decade >= 4");
    EmbeddingReport rep;
    rep.p = pexp;

    int count = std::max(3, int(std::ceil(per_decade * std::log10(r_hi / r_lo))) + 1);
    rep.r.resize(count);
    double llo = std::log(r_lo), lhi = std::log(r_hi);
    for (int i = 0; i < count; ++i) rep.r[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
    rep.r.front() = r_lo;
    rep.r.back() = r_hi;

    auto whead = [&](double s) { return std::pow(p.eval(s).psi, n - 1); };
    auto wtail = [&](double s) { return std::pow(p.eval(s).psi, 1.0 - n); };
    std::vector<double> head = quadrature::cumulative(whead, rep.r, head_integral(p, n, r_lo));
    double tail_end = tail_integral(p, n, r_hi);

    // accumulate the tail outward-in with per-cell Simpson sums: subtracting
    // two nearly equal cumulative integrals would wipe out the small values
    // that decide the end slope
    std::vector<double> tail(count, tail_end);
    bool divergent_tail = !std::isfinite(tail_end);
    if (!divergent_tail) {
        for (int i = count - 2; i >= 0; --i) {
            double a = rep.r[i], b = rep.r[i + 1];
            tail[i] = tail[i + 1] +
                      (b - a) / 6.0 * (wtail(a) + 4.0 * wtail(0.5 * (a + b)) + wtail(b));
        }
    }

    rep.B.resize(count);
    for (int i = 0; i < count; ++i) {
        if (divergent_tail) {
            rep.B[i] = kInf;
            continue;
        }
        rep.B[i] = std::pow(head[i], 1.0 / pexp) * std::sqrt(tail[i]);
        if (!std::isfinite(rep.B[i]))
            throw std::invalid_argument(
                "embedding_report: weight overflows on the window; shrink r_hi");
    }
    if (divergent_tail) {
        rep.sup_B = kInf;
        rep.limit_0 = rep.limit_inf = kInf;
        rep.verdict = Verdict::not_continuous;
        return rep;
    }

    rep.sup_B = *std::max_element(rep.B.begin(), rep.B.end());
    std::vector<double> x0, y0, x1, y1;
    for (int i = 0; i < count; ++i) {
        if (rep.r[i] <= r_lo * 10.0) {
            x0.push_back(rep.r[i]);
            y0.push_back(rep.B[i]);
        }
        if (rep.r[i] >= r_hi / 10.0) {
            x1.push_back(rep.r[i]);
            y1.push_back(rep.B[i]);
        }
    }
    rep.slope_0 = fit::loglog(x0, y0).slope;
    rep.slope_inf = fit::loglog(x1, y1).slope;

    constexpr double kSlopeTol = 0.01;
    rep.limit_0 = (rep.slope_0 > kSlopeTol) ? 0.0
                  : (rep.slope_0 < -kSlopeTol) ? kInf
                                               : rep.B.front();
    rep.limit_inf = (rep.slope_inf < -kSlopeTol) ? 0.0
                    : (rep.slope_inf > kSlopeTol) ? kInf
                                                  : rep.B.back();
    if (!std::isfinite(rep.limit_0) || !std::isfinite(rep.limit_inf))
        rep.verdict = Verdict::not_continuous;
    else if (rep.limit_0 < 1e-3 * rep.sup_B && rep.limit_inf < 1e-3 * rep.sup_B)
        rep.verdict = Verdict::continuous_and_compact;
    else
        rep.verdict = Verdict::continuous_not_compact;
    return rep;
}

QuotientResult rayleigh_minimize(const manifold::Profile& p, int n, double q, double R,
                                 int mesh_size) {
    return minimize_impl(p, n, q, R, mesh_size);
}

ScanResult quotient_limit_scan(const manifold::Profile& p, int n, double q,
                               const std::vector<double>& R_list, int mesh_size, int threads) {
    if (R_list.empty()) throw std::invalid_argument("quotient_limit_scan: empty R list");
    ScanResult out;
    out.rows.resize(R_list.size());

    int nt = threads > 0 ? threads : int(std::thread::hardware_concurrency());
    nt = std::clamp(nt, 1, int(R_list.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= R_list.size()) return;
            try {
                out.rows[i] = minimize_impl(p, n, q, R_list[i], mesh_size);
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

    std::vector<double> Rs, Is;
    for (const auto& row : out.rows) {
        Rs.push_back(row.R);
        Is.push_back(row.I_R);
    }
    if (Rs.size() >= 2) out.fitted_slope = fit::loglog(Rs, Is).slope;

    double best_R = -1;
    for (std::size_t i = 0; i < Rs.size(); ++i)
        for (std::size_t j = 0; j < Rs.size(); ++j)
            if (std::abs(Rs[j] / Rs[i] - 2.0) < 0.01 && Rs[i] > best_R) {
                best_R = Rs[i];
                out.last_doubling_change = std::abs(Is[j] - Is[i]) / Is[i];
            }
    if (best_R < 0 && Rs.size() >= 2)
        out.last_doubling_change = std::abs(Is.back() - Is[Is.size() - 2]) / Is[Is.size() - 2];
    return out;
}

QuotientComparison compare_quotients(const manifold::Profile& p, int n, double alpha,
                                     double kappa, double q, double R, int mesh_size) {
    double qc = manifold::critical_exponents(n, alpha).two_star_alpha - 1.0;
    if (std::abs(q - qc) > 1e-9)
        throw std::invalid_argument("compare_quotients: q must equal two_star_alpha - 1");
    if (!(kappa > 0)) throw std::invalid_argument("compare_quotients: kappa must be positive");

    PurePower flat(alpha, kappa);
    QuotientComparison out;
    double Ip_half = minimize_impl(p, n, q, R, mesh_size / 2).I_R;
    double Ia_half = minimize_impl(flat, n, q, R, mesh_size / 2).I_R;
    out.I_psi = minimize_impl(p, n, q, R, mesh_size).I_R;
    out.I_alpha = minimize_impl(flat, n, q, R, mesh_size).I_R;
    out.err_psi = std::abs(out.I_psi - Ip_half);
    out.err_alpha = std::abs(out.I_alpha - Ia_half);
    out.strict_gap = (out.I_alpha - out.I_psi) > 3.0 * (out.err_psi + out.err_alpha);
    return out;
}

}  // namespace lem::sobolev
