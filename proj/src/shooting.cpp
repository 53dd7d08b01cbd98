#include "lem/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lem/fit.hpp"
#include "lem/ode.hpp"

namespace lem::shooting {

namespace {

double power_term(double u, double q) { return u * std::pow(std::abs(u), q - 1.0); }

double hermite(double x0, double x1, double v0, double v1, double d0, double d1, double x) {
    double h = x1 - x0, t = (x - x0) / h, t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + t) * h * d0 +
           (-2 * t3 + 3 * t2) * v1 + (t3 - t2) * h * d1;
}

std::size_t locate(const std::vector<double>& xs, double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = (it == xs.begin()) ? 0 : static_cast<std::size_t>(it - xs.begin() - 1);
    return std::min(i, xs.size() - 2);
}

}  // namespace

std::string event_name(Event e) {
    switch (e) {
        case Event::first_zero: return "first_zero";
        case Event::reached_r_max: return "reached_r_max";
        case Event::blow_up: return "blow_up";
        case Event::step_underflow: return "step_underflow";
    }
    throw std::invalid_argument("event_name: bad enum value");
}

Trajectory integrate_cauchy(const CauchyProblem& problem, double r_max, const Options& opt) {
    if (!problem.psi) throw std::invalid_argument("integrate_cauchy: null profile");
    if (problem.n < 2) throw std::invalid_argument("integrate_cauchy: dimension n must be >= 2");
    if (!(problem.q > 1.0)) throw std::invalid_argument("integrate_cauchy: exponent q must exceed 1");
    if (!(problem.a > 0.0)) throw std::invalid_argument("integrate_cauchy: amplitude a must be positive");
    if (!(opt.eps0 > 0.0) || !(r_max > opt.eps0))
        throw std::invalid_argument("integrate_cauchy: need 0 < eps0 < r_max");

    const manifold::Profile& psi = *problem.psi;
    const int n = problem.n;
    const double q = problem.q, a = problem.a;

    lem::ode::Dopri5<2> solver([&](double r, const lem::ode::State<2>& y,
                                   lem::ode::State<2>& dy) {
        dy[0] = y[1];
        dy[1] = -(n - 1) * psi.log_deriv(r) * y[1] - power_term(y[0], q);
    });
    solver.rtol = opt.rtol;
    solver.atol = opt.atol * std::max(1.0, a);

    Trajectory t;
    t.problem = problem;
    t.rtol = solver.rtol;
    t.atol = solver.atol;

    double aq = std::pow(a, q), eps = opt.eps0;
    lem::ode::State<2> y0{a - aq * eps * eps / (2.0 * n), -aq * eps / n};
    t.r.push_back(eps);
    t.u.push_back(y0[0]);
    t.du.push_back(y0[1]);

    const double sample_h = (r_max - eps) / std::max(1, opt.samples_hint);
    bool stopped = false;

    auto refine_zero = [&](const lem::ode::DenseStep<2>& st, double lo, double hi) {
        // bisection on the dense polynomial; sign(u(lo)) != sign(u(hi))
        double ulo = st.eval(lo)[0];
        while (hi - lo > 1e-14 * std::max(1.0, std::abs(hi))) {
            double mid = 0.5 * (lo + hi);
            double um = st.eval(mid)[0];
            if ((um > 0) == (ulo > 0)) {
                lo = mid;
                ulo = um;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };

    auto observer = [&](const lem::ode::DenseStep<2>& st) {
        double rho = 0.0;
        bool crossed = false;
        if ((st.y0[0] > 0) != (st.y1[0] > 0) || st.y1[0] == 0.0) {
            crossed = true;
            rho = refine_zero(st, st.r0, st.r1());
            t.zeros.push_back(rho);
        }
        double stop_at = (crossed && !opt.continue_past_zero) ? rho : st.r1();
        int m = std::max(1, int(std::ceil(st.h / sample_h)));
        for (int j = 1; j <= m; ++j) {
            double r = st.r0 + st.h * j / m;
            if (r >= stop_at) break;
            auto yj = st.eval(r);
            t.r.push_back(r);
            t.u.push_back(yj[0]);
            t.du.push_back(yj[1]);
        }
        if (crossed && !opt.continue_past_zero) {
            auto yz = st.eval(rho);
            t.r.push_back(rho);
            t.u.push_back(yz[0]);
            t.du.push_back(yz[1]);
            t.event = Event::first_zero;
            t.r_event = rho;
            stopped = true;
            return lem::ode::Control::stop;
        }
        t.r.push_back(st.r1());
        t.u.push_back(st.y1[0]);
        t.du.push_back(st.y1[1]);
        if (std::max(std::abs(st.y1[0]), std::abs(st.y1[1])) > opt.blow_up_threshold) {
            t.event = Event::blow_up;
            t.r_event = st.r1();
            stopped = true;
            return lem::ode::Control::stop;
        }
        return lem::ode::Control::go_on;
    };

    auto res = solver.integrate(eps, y0, r_max, observer);
    if (!stopped) {
        switch (res.status) {
            case lem::ode::Status::reached_end:
                t.event = Event::reached_r_max;
                t.r_event = r_max;
                break;
            case lem::ode::Status::step_underflow:
                t.event = Event::step_underflow;
                t.r_event = res.r;
                break;
            case lem::ode::Status::max_steps:
                throw std::runtime_error("integrate_cauchy: step budget exhausted");
            case lem::ode::Status::halted:
                break;  // unreachable: halts set `stopped`
        }
    }
    return t;
}

double Trajectory::u_at(double radius) const {
    if (r.size() < 2) throw std::runtime_error("Trajectory::u_at: too few samples");
    std::size_t i = locate(r, radius);
    return hermite(r[i], r[i + 1], u[i], u[i + 1], du[i], du[i + 1], radius);
}

double Trajectory::du_at(double radius) const {
    if (r.size() < 2) throw std::runtime_error("Trajectory::du_at: too few samples");
    std::size_t i = locate(r, radius);
    const manifold::Profile& psi = *problem.psi;
    auto ddu = [&](std::size_t j) {
        return -(problem.n - 1) * psi.log_deriv(r[j]) * du[j] - power_term(u[j], problem.q);
    };
    return hermite(r[i], r[i + 1], du[i], du[i + 1], ddu(i), ddu(i + 1), radius);
}

std::optional<double> first_zero(const CauchyProblem& problem, double r_max, const Options& opt) {
    Trajectory t = integrate_cauchy(problem, r_max, opt);
    if (!t.zeros.empty()) return t.zeros.front();
    return std::nullopt;
}

double residual(const Trajectory& t) {
    if (t.r.size() < 3) throw std::runtime_error("residual: too few samples");
    const manifold::Profile& psi = *t.problem.psi;
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < t.r.size(); ++i) {
        double h1 = t.r[i] - t.r[i - 1], h2 = t.r[i + 1] - t.r[i];
        // second differences are O(h^2)-accurate only on uniform triples;
        // skip the (few) samples where adjacent accepted steps meet
        if (std::abs(h2 - h1) > 1e-6 * (h1 + h2)) continue;
        double fd = 2.0 * (t.u[i - 1] / (h1 * (h1 + h2)) - t.u[i] / (h1 * h2) +
                           t.u[i + 1] / (h2 * (h1 + h2)));
        double lhs = fd + (t.problem.n - 1) * psi.log_deriv(t.r[i]) * t.du[i] +
                     power_term(t.u[i], t.problem.q);
        double scale = std::max(1.0, std::pow(std::abs(t.u[i]), t.problem.q));
        worst = std::max(worst, std::abs(lhs) / scale);
    }
    return worst;
}

DecayFit decay_fit(const Trajectory& t, double r_lo, double r_hi) {
    if (!(r_lo < r_hi)) throw std::invalid_argument("decay_fit: need r_lo < r_hi");
    std::vector<double> xs, au, adu;
    for (std::size_t i = 0; i < t.r.size(); ++i) {
        if (t.r[i] < r_lo || t.r[i] > r_hi) continue;
        if (t.u[i] == 0.0 || t.du[i] == 0.0) continue;
        xs.push_back(t.r[i]);
        au.push_back(std::abs(t.u[i]));
        adu.push_back(std::abs(t.du[i]));
    }
    if (xs.size() < 8) throw std::invalid_argument("decay_fit: window holds too few samples");
    DecayFit out;
    out.r_lo = r_lo;
    out.r_hi = r_hi;
    auto fu = fit::loglog(xs, au);
    auto fdu = fit::loglog(xs, adu);
    out.exponent_u = fu.slope;
    out.rms_u = fu.rms;
    out.exponent_du = fdu.slope;
    out.rms_du = fdu.rms;
    return out;
}

}  // namespace lem::shooting
