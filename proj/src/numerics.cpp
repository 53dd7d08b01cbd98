#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lem/fit.hpp"
#include "lem/interp.hpp"
#include "lem/quadrature.hpp"

namespace lem::quadrature {

namespace {

double simpson(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const Fn& f, double a, double m, double b, double fa, double fm, double fb,
             double whole, double rel_tol, double abs_tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(fa, flm, fm, a, m);
    double right = simpson(fm, frm, fb, m, b);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * (abs_tol + rel_tol * std::abs(left + right)))
        return left + right + delta / 15.0;
    return adapt(f, a, lm, m, fa, flm, fm, left, rel_tol, abs_tol * 0.5, depth - 1) +
           adapt(f, m, rm, b, fm, frm, fb, right, rel_tol, abs_tol * 0.5, depth - 1);
}

}  // namespace

double integrate(const Fn& f, double a, double b, double rel_tol, double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = simpson(fa, fm, fb, a, b);
    return adapt(f, a, m, b, fa, fm, fb, whole, rel_tol, abs_tol, max_depth);
}

std::vector<double> cumulative(const Fn& f, const std::vector<double>& r, double c0) {
    std::vector<double> out(r.size());
    if (r.empty()) return out;
    out[0] = c0;
    double fl = f(r[0]);
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        double fr = f(r[i + 1]);
        double fm = f(0.5 * (r[i] + r[i + 1]));
        out[i + 1] = out[i] + simpson(fl, fm, fr, r[i], r[i + 1]);
        fl = fr;
    }
    return out;
}

double power_tail(double kappa, double alpha, int n, double R) {
    double e = alpha * (n - 1);
    if (e <= 1.0) throw std::invalid_argument("power_tail: divergent, alpha*(n-1) <= 1");
    return std::pow(kappa, 1.0 - n) * std::pow(R, 1.0 - e) / (e - 1.0);
}

}  // namespace lem::quadrature

namespace lem::interp {

HermiteTable::HermiteTable(std::vector<double> x, std::vector<double> v, std::vector<double> d)
    : x_(std::move(x)), v_(std::move(v)), d_(std::move(d)) {
    if (x_.size() < 2 || x_.size() != v_.size() || x_.size() != d_.size())
        throw std::invalid_argument("HermiteTable: need >= 2 consistent nodes");
    for (std::size_t i = 0; i + 1 < x_.size(); ++i)
        if (!(x_[i] < x_[i + 1])) throw std::invalid_argument("HermiteTable: nodes not increasing");
}

std::size_t HermiteTable::locate(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin() - 1);
    return std::min(i, x_.size() - 2);
}

double HermiteTable::value(double x) const {
    std::size_t i = locate(x);
    double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * v_[i] + (t3 - 2 * t2 + t) * h * d_[i] +
           (-2 * t3 + 3 * t2) * v_[i + 1] + (t3 - t2) * h * d_[i + 1];
}

double HermiteTable::deriv(double x) const {
    std::size_t i = locate(x);
    double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
    double t2 = t * t;
    return ((6 * t2 - 6 * t) * (v_[i] - v_[i + 1]) / h + (3 * t2 - 4 * t + 1) * d_[i] +
            (3 * t2 - 2 * t) * d_[i + 1]);
}

double HermiteTable::second(double x) const {
    std::size_t i = locate(x);
    double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
    return ((12 * t - 6) * (v_[i] - v_[i + 1]) / h + (6 * t - 4) * d_[i] + (6 * t - 2) * d_[i + 1]) / h;
}

namespace {

struct Builder {
    const std::function<double(double)>& f;
    double tol_abs, span, cell_frac;
    int max_depth;
    std::vector<double>*x, *v, *d;

    // returns the refined integral over [a, b] so the caller can seed the
    // right half's baseline with it; using the coarse Simpson estimate there
    // would bake its error into every node downstream
    double refine(double a, double fa, double m, double fm, double b, double fb, double cum, int depth) {
        double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        double flm = f(lm), frm = f(rm);
        double S1 = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        bool small_enough = (b - a) <= cell_frac * (std::abs(a) + 1e-6 * span);
        bool accurate = std::abs(left + right - S1) <= 15.0 * tol_abs * (b - a) / span;
        if (depth <= 0 || (accurate && small_enough)) {
            x->push_back(m);
            v->push_back(cum + left);
            d->push_back(fm);
            x->push_back(b);
            v->push_back(cum + left + right);
            d->push_back(fb);
            return left + right;
        }
        double lf = refine(a, fa, lm, flm, m, fm, cum, depth - 1);
        double rf = refine(m, fm, rm, frm, b, fb, cum + lf, depth - 1);
        return lf + rf;
    }
};

}  // namespace

HermiteTable integral_table(const std::function<double(double)>& f, double a, double b,
                            double f0, double tol, int max_depth) {
    if (!(a < b)) throw std::invalid_argument("integral_table: need a < b");
    double rough = quadrature::integrate(f, a, b, 1e-8, 0.0, 32);
    std::vector<double> x, v, d;
    x.reserve(4096);
    v.reserve(4096);
    d.reserve(4096);
    double fa = f(a);
    x.push_back(a);
    v.push_back(f0);
    d.push_back(fa);
    Builder bld{f, tol * (1.0 + std::abs(rough)), b - a, 0.01, max_depth, &x, &v, &d};
    double m = 0.5 * (a + b);
    bld.refine(a, fa, m, f(m), b, f(b), f0, max_depth);
    return HermiteTable(std::move(x), std::move(v), std::move(d));
}

}  // namespace lem::interp

namespace lem::fit {

namespace {
double rms_of(const std::vector<double>& e) {
    double s = 0;
    for (double v : e) s += v * v;
    return e.empty() ? 0.0 : std::sqrt(s / e.size());
}
}  // namespace

LineFit linear(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear fit: need >= 2 points");
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double det = n * sxx - sx * sx;
    if (det == 0) throw std::invalid_argument("linear fit: degenerate abscissae");
    LineFit out;
    out.slope = (n * sxy - sx * sy) / det;
    out.intercept = (sy - out.slope * sx) / n;
    std::vector<double> e(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) e[i] = y[i] - out.slope * x[i] - out.intercept;
    out.rms = rms_of(e);
    return out;
}

LineFit loglog(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) throw std::invalid_argument("loglog fit: non-positive sample");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return linear(lx, ly);
}

QuadFit quadratic(const std::vector<double>& x, const std::vector<double>& y, double x0) {
    if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("quadratic fit: need >= 3 points");
    double s[5] = {static_cast<double>(x.size()), 0, 0, 0, 0};
    double b[3] = {0, 0, 0};
    for (std::size_t i = 0; i < x.size(); ++i) {
        double t = x[i] - x0, t2 = t * t;
        s[1] += t;
        s[2] += t2;
        s[3] += t2 * t;
        s[4] += t2 * t2;
        b[0] += y[i];
        b[1] += y[i] * t;
        b[2] += y[i] * t2;
    }
    double m[3][4] = {{s[0], s[1], s[2], b[0]}, {s[1], s[2], s[3], b[1]}, {s[2], s[3], s[4], b[2]}};
    for (int c = 0; c < 3; ++c) {  // tiny Gaussian elimination with partial pivot
        int piv = c;
        for (int r2 = c + 1; r2 < 3; ++r2)
            if (std::abs(m[r2][c]) > std::abs(m[piv][c])) piv = r2;
        std::swap(m[c], m[piv]);
        if (m[c][c] == 0) throw std::invalid_argument("quadratic fit: singular system");
        for (int r2 = 0; r2 < 3; ++r2) {
            if (r2 == c) continue;
            double fac = m[r2][c] / m[c][c];
            for (int cc = c; cc < 4; ++cc) m[r2][cc] -= fac * m[c][cc];
        }
    }
    QuadFit out;
    out.c0 = m[0][3] / m[0][0];
    out.c1 = m[1][3] / m[1][1];
    out.c2 = m[2][3] / m[2][2];
    std::vector<double> e(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double t = x[i] - x0;
        e[i] = y[i] - (out.c0 + out.c1 * t + out.c2 * t * t);
    }
    out.rms = rms_of(e);
    return out;
}

PowerPairFit power_pair(const std::vector<double>& x, const std::vector<double>& y,
                        double e1, double e2) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("power_pair fit: need >= 2 points");
    double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0, yy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double c1 = std::pow(x[i], e1), c2 = std::pow(x[i], e2);
        s11 += c1 * c1;
        s12 += c1 * c2;
        s22 += c2 * c2;
        b1 += c1 * y[i];
        b2 += c2 * y[i];
        yy += y[i] * y[i];
    }
    double det = s11 * s22 - s12 * s12;
    if (det == 0) throw std::invalid_argument("power_pair fit: singular system");
    PowerPairFit out;
    out.a1 = (s22 * b1 - s12 * b2) / det;
    out.a2 = (s11 * b2 - s12 * b1) / det;
    double se = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - out.a1 * std::pow(x[i], e1) - out.a2 * std::pow(x[i], e2);
        se += r * r;
    }
    out.rel_residual = (yy > 0) ? std::sqrt(se / yy) : std::sqrt(se / x.size());
    return out;
}

double trimmed_geomean(std::vector<double> samples, double trim_frac) {
    if (samples.empty()) throw std::invalid_argument("trimmed_geomean: empty");
    for (double v : samples)
        if (!(v > 0)) throw std::invalid_argument("trimmed_geomean: non-positive sample");
    std::sort(samples.begin(), samples.end());
    std::size_t cut = static_cast<std::size_t>(std::floor(samples.size() * trim_frac));
    if (samples.size() <= 2 * cut) cut = 0;
    double acc = 0;
    std::size_t count = 0;
    for (std::size_t i = cut; i < samples.size() - cut; ++i, ++count) acc += std::log(samples[i]);
    return std::exp(acc / count);
}

}  // namespace lem::fit
