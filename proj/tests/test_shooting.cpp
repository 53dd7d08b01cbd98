#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lem/model.hpp"
#include "lem/shooting.hpp"

using namespace lem;
using shooting::CauchyProblem;
using shooting::Event;
using shooting::Options;

namespace {

// independent fixed-step RK4 integration of u'' = -(n-1)(psi'/psi)u' - |u|^{q-1}u
// with the same two-term series start the adaptive solver uses
struct Rk4Result {
    double u, du;
};
Rk4Result rk4_oracle(const manifold::Profile& psi, int n, double q, double a,
                     double r_end, double h) {
    const double eps0 = 1e-6;
    double fa = std::abs(a);
    double u = a - a * std::pow(fa, q - 1.0) * eps0 * eps0 / (2.0 * n);
    double v = -a * std::pow(fa, q - 1.0) * eps0 / n;
    auto acc = [&](double r, double uu, double vv) {
        return -(n - 1) * psi.log_deriv(r) * vv - std::pow(std::abs(uu), q - 1.0) * uu;
    };
    double r = eps0;
    while (r < r_end - 1e-15) {
        double step = std::min(h, r_end - r);
        double k1u = v, k1v = acc(r, u, v);
        double k2u = v + 0.5 * step * k1v, k2v = acc(r + 0.5 * step, u + 0.5 * step * k1u, v + 0.5 * step * k1v);
        double k3u = v + 0.5 * step * k2v, k3v = acc(r + 0.5 * step, u + 0.5 * step * k2u, v + 0.5 * step * k2v);
        double k4u = v + step * k3v, k4v = acc(r + step, u + step * k3u, v + step * k3v);
        u += step / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
        v += step / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        r += step;
    }
    return {u, v};
}

}  // namespace

TEST_CASE("adaptive solver matches a fixed-step RK4 oracle") {
    auto eu = manifold::make_euclidean();
    auto t = shooting::integrate_cauchy({eu, 3, 3.0, 1.0}, 2.0);
    auto o = rk4_oracle(*eu, 3, 3.0, 1.0, 2.0, 1e-4);
    CHECK(t.u_at(2.0) == doctest::Approx(o.u).epsilon(1e-7));
    CHECK(t.du_at(2.0) == doctest::Approx(o.du).epsilon(1e-7));

    auto hy = manifold::make_hyperbolic();
    auto th = shooting::integrate_cauchy({hy, 3, 2.0, 2.0}, 1.0);
    auto oh = rk4_oracle(*hy, 3, 2.0, 2.0, 1.0, 1e-4);
    CHECK(th.u_at(1.0) == doctest::Approx(oh.u).epsilon(1e-7));
    CHECK(th.du_at(1.0) == doctest::Approx(oh.du).epsilon(1e-7));
}

TEST_CASE("euclidean critical shot reproduces the closed-form ground state") {
    // for n=3, q=5 the solution with u(0)=1 is exactly (1 + r^2/3)^{-1/2}
    auto eu = manifold::make_euclidean();
    auto t = shooting::integrate_cauchy({eu, 3, 5.0, 1.0}, 200.0);
    CHECK(t.event == Event::reached_r_max);
    for (double r : {0.5, 1.0, 5.0, 20.0, 50.0}) {
        double exact = 1.0 / std::sqrt(1.0 + r * r / 3.0);
        CHECK(t.u_at(r) == doctest::Approx(exact).epsilon(1e-5));
    }
    auto fit = shooting::decay_fit(t, 20.0, 150.0);
    CHECK(fit.exponent_u == doctest::Approx(-1.0).epsilon(0.02));
}

TEST_CASE("first-zero refinement meets its residual contract") {
    auto eu = manifold::make_euclidean();
    auto t = shooting::integrate_cauchy({eu, 3, 3.0, 1.0}, 100.0);
    REQUIRE(t.event == Event::first_zero);
    CHECK(t.r_event > 1.0);
    CHECK(std::abs(t.u_at(t.r_event)) < 1e-10);
    REQUIRE(t.zeros.size() == 1);
    CHECK(t.zeros[0] == t.r_event);

    auto rho = shooting::first_zero({eu, 3, 3.0, 1.0}, 100.0);
    REQUIRE(rho.has_value());
    CHECK(*rho == t.r_event);
}

TEST_CASE("euclidean cubic branch obeys the exact height scaling") {
    // q=3: u_a(r) = a u_1(a r), so rho(a) sqrt(a^2)... rho scales as 1/a
    auto eu = manifold::make_euclidean();
    auto r1 = shooting::first_zero({eu, 3, 3.0, 1.0}, 200.0);
    auto r4 = shooting::first_zero({eu, 3, 3.0, 4.0}, 200.0);
    auto rq = shooting::first_zero({eu, 3, 3.0, 0.25}, 200.0);
    REQUIRE(r1);
    REQUIRE(r4);
    REQUIRE(rq);
    CHECK(*r4 == doctest::Approx(*r1 / 4.0).epsilon(1e-7));
    CHECK(*rq == doctest::Approx(*r1 * 4.0).epsilon(1e-7));
}

TEST_CASE("result is invariant under start-radius and tolerance changes") {
    auto eu = manifold::make_euclidean();
    Options o1;
    auto a1 = shooting::first_zero({eu, 3, 3.0, 1.0}, 100.0, o1);
    Options o2;
    o2.eps0 = 1e-7;
    auto a2 = shooting::first_zero({eu, 3, 3.0, 1.0}, 100.0, o2);
    Options o3;
    o3.rtol = 1e-12;
    o3.atol = 1e-14;
    auto a3 = shooting::first_zero({eu, 3, 3.0, 1.0}, 100.0, o3);
    REQUIRE((a1 && a2 && a3));
    CHECK(std::abs(*a2 - *a1) < 1e-8 * *a1);
    CHECK(std::abs(*a3 - *a1) < 1e-8 * *a1);
}

TEST_CASE("hyperbolic space splits small and large heights") {
    auto hy = manifold::make_hyperbolic();
    auto small = shooting::integrate_cauchy({hy, 3, 2.0, 0.01}, 50.0);
    CHECK(small.event == Event::reached_r_max);
    CHECK(small.u.back() > 0.0);
    for (double u : small.u) CHECK(u > 0.0);

    auto large = shooting::integrate_cauchy({hy, 3, 2.0, 10.0}, 50.0);
    CHECK(large.event == Event::first_zero);
    CHECK(large.r_event < 5.0);
}

TEST_CASE("integration can continue past the first zero and records every crossing") {
    auto eu = manifold::make_euclidean();
    Options o;
    o.continue_past_zero = true;
    auto t = shooting::integrate_cauchy({eu, 3, 3.0, 1.0}, 120.0, o);
    CHECK(t.event == Event::reached_r_max);
    CHECK(t.zeros.size() >= 3);
    for (double z : t.zeros) CHECK(std::abs(t.u_at(z)) < 1e-8);
    for (std::size_t i = 1; i < t.zeros.size(); ++i) CHECK(t.zeros[i] > t.zeros[i - 1]);
}

TEST_CASE("stored samples interpolate consistently") {
    auto eu = manifold::make_euclidean();
    auto t = shooting::integrate_cauchy({eu, 3, 3.0, 1.0}, 2.0);
    for (std::size_t i = 1; i < t.r.size(); ++i) CHECK(t.r[i] > t.r[i - 1]);
    std::size_t mid = t.r.size() / 2;
    CHECK(t.u_at(t.r[mid]) == t.u[mid]);
    CHECK(t.du_at(t.r[mid]) == t.du[mid]);
    double rm = 0.5 * (t.r[mid] + t.r[mid + 1]);
    double h = 1e-6;
    double fd = (t.u_at(rm + h) - t.u_at(rm - h)) / (2.0 * h);
    CHECK(fd == doctest::Approx(t.du_at(rm)).epsilon(1e-5));
    CHECK(shooting::residual(t) < 1e-3);
}

TEST_CASE("sample density follows the hint") {
    auto eu = manifold::make_euclidean();
    Options o;
    o.samples_hint = 500;
    auto t = shooting::integrate_cauchy({eu, 3, 3.0, 1.0}, 5.0, o);
    CHECK(t.r.size() >= 400);
    CHECK(t.r.size() <= 5000);
    CHECK(t.rtol == o.rtol);
    CHECK(t.problem.a == 1.0);
}
