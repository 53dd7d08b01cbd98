#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lem/model.hpp"

using namespace lem::manifold;

TEST_CASE("critical exponents reproduce the rational values for (3, 2)") {
    auto e = critical_exponents(3, 2.0);
    // beta = 4 makes every threshold an exact small rational
    CHECK(e.two_tilde == 5.0 / 3.0);
    CHECK(e.two_star_alpha == 10.0 / 3.0);
    CHECK(e.two_star == 6.0);

    auto e41 = critical_exponents(4, 1.0);  // beta = 3
    CHECK(e41.two_tilde == 2.0);
    CHECK(e41.two_star_alpha == 4.0);
    CHECK(e41.two_star == 4.0);

    auto e2 = critical_exponents(2, 3.0);  // n = 2: no Sobolev ceiling
    CHECK(e2.two_tilde == 2.0);
    CHECK(std::isinf(e2.two_star));
}

TEST_CASE("degenerate growth rates are rejected") {
    CHECK_THROWS_AS(critical_exponents(2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(critical_exponents(3, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(classify_regime(3, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_shifted_power(0.99), std::invalid_argument);
}

TEST_CASE("regime labels split q-space at the three thresholds") {
    auto lab = [](double q) { return classify_regime(3, 2.0, q).label; };
    CHECK(lab(1.2) == RegimeLabel::strongly_subcritical);
    CHECK(lab(5.0 / 3.0) == RegimeLabel::strongly_subcritical);   // boundary folds down
    CHECK(lab(2.0) == RegimeLabel::intermediate);
    CHECK(lab(7.0 / 3.0) == RegimeLabel::intermediate_critical);  // exact threshold
    CHECK(lab(3.0) == RegimeLabel::slightly_subcritical);
    CHECK(lab(5.0) == RegimeLabel::at_or_above_sobolev_critical);
    CHECK(lab(8.0) == RegimeLabel::at_or_above_sobolev_critical);

    auto reg = classify_regime(3, 2.0, 2.0);
    CHECK(reg.t_strong == 5.0 / 3.0);
    CHECK(reg.t_intermediate == 10.0 / 3.0 - 1.0);
    CHECK(reg.t_sobolev == 5.0);
    CHECK(regime_name(RegimeLabel::intermediate) == "intermediate");
}

TEST_CASE("weighted volume has the closed-form values") {
    // shifted power, alpha=2: psi = r + r^2/2, int_0^2 psi^2 = 124/15
    auto sp = make_shifted_power(2.0);
    CHECK(volume(*sp, 3, 2.0) == doctest::Approx(124.0 / 15.0).epsilon(1e-10));
    auto eu = make_euclidean();
    CHECK(volume(*eu, 3, 3.0) == doctest::Approx(9.0).epsilon(1e-10));
    auto hy = make_hyperbolic();
    double sh = std::sinh(1.0), ch = std::cosh(1.0);
    CHECK(volume(*hy, 3, 1.0) == doctest::Approx((sh * ch - 1.0) / 2.0).epsilon(1e-10));
}

TEST_CASE("pole and positivity validation passes for every factory") {
    const ProfilePtr ps[] = {
        make_euclidean(),
        make_hyperbolic(),
        make_shifted_power(2.0),
        make_arctan_profile(2.0),
        make_f_profile(3.0, "tanh"),
        make_f_profile(2.0, "saturating", 2.0),
        make_linear_power(2.0, 1.0),
        make_comparison(2.0, 1.0, 1.0).profile,
    };
    for (const auto& p : ps) {
        INFO(p->describe());
        auto rep = validate_profile(*p, 1e3);
        CHECK(rep.pole_ok);
        CHECK(rep.positive_ok);
        CHECK(rep.alpha_ok);
    }
}

TEST_CASE("jets obey psi(0+) ~ r with the curvature correction") {
    // shifted power has psi''(0) != 0, so psi(h)/h deviates at first order
    auto sp = make_shifted_power(2.0);
    double h = 1e-4;
    CHECK(std::abs(sp->eval(h).psi / h - 1.0) > 1e-5);
    CHECK(std::abs(sp->eval(h).psi / h - 1.0 - 0.5 * sp->eval(h).ddpsi * h) < 1e-8);
}

TEST_CASE("log-derivative is overflow-safe far out") {
    auto hy = make_hyperbolic();
    CHECK(hy->log_deriv(800.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::isfinite(hy->log_deriv(5000.0)));
    auto sp = make_shifted_power(2.0);
    CHECK(sp->log_deriv(1e6) * 1e6 == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("curvature signs distinguish the families") {
    auto hy = make_hyperbolic();
    CHECK(curvature(*hy, 3, 1.0).sectional == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(curvature(*hy, 3, 1.0).ricci == doctest::Approx(-2.0).epsilon(1e-12));
    auto eu = make_euclidean();
    CHECK(curvature(*eu, 3, 1.0).sectional == 0.0);
    auto sp = make_shifted_power(2.0);
    CHECK(curvature(*sp, 3, 0.5).sectional < 0.0);
}

TEST_CASE("rate-bound multiplier check: affirms euclidean, rejects hyperbolic") {
    auto eu = make_euclidean();
    auto re = check_rate_bound(*eu, 3, 4.0, 50.0, 1024);
    CHECK(re.holds);
    CHECK(re.margin == doctest::Approx(0.5 + 0.2 - 2.0 / 3.0).epsilon(1e-6));

    auto hy = make_hyperbolic();
    auto rh = check_rate_bound(*hy, 3, 2.0, 10.0, 1024);
    CHECK_FALSE(rh.holds);
    CHECK(rh.margin < -0.05);
    CHECK(rh.worst_r > 1.0);
}

TEST_CASE("root-concavity check holds for polynomial profiles and rejects exponential ones") {
    auto sp = make_shifted_power(2.0);
    auto r = check_root_concavity(*sp, 100.0, 2048);
    CHECK(r.holds);
    CHECK(r.margin >= 0.0);
    auto eu = make_euclidean();
    CHECK(check_root_concavity(*eu, 100.0).holds);
    auto hy = make_hyperbolic();
    CHECK_THROWS_AS(check_root_concavity(*hy, 10.0), std::invalid_argument);
}

TEST_CASE("piecewise sinh-power profile is continuous at the seam") {
    double r_bar = 0.6, r_tilde = 0.1;
    auto p = make_piecewise_sinh_power(2.0, r_bar, r_tilde);
    double below = p->eval(r_bar - 1e-10).psi;
    double above = p->eval(r_bar + 1e-10).psi;
    CHECK(below == doctest::Approx(above).epsilon(1e-8));
    CHECK(p->eval(r_bar / 2).psi == doctest::Approx(std::sinh(r_bar / 2)).epsilon(1e-12));
    double kappa = p->params().at("kappa");
    CHECK(p->eval(2.0).psi == doctest::Approx(kappa * std::pow(2.0 - r_tilde, 2.0)).epsilon(1e-12));
    CHECK(kappa > 0.0);
}

TEST_CASE("curvature-matched comparison profile fits its two-term tail") {
    auto c = make_comparison(2.0, 1.0, 1.0);
    CHECK(c.s_plus == 2.0);
    CHECK(c.s_minus == -1.0);
    CHECK(c.rel_residual < 1e-6);
    CHECK(c.profile->alpha().value() == 2.0);
    auto rep = validate_profile(*c.profile, 1e3);
    CHECK(rep.pole_ok);
    CHECK(rep.alpha_ok);
}

TEST_CASE("tabulation round-trips profile jets") {
    // cubic Hermite on a log grid: relative error ~ (r ln10 / per_decade)^4
    // for exponential growth, so a dense grid is needed at large radii
    auto hy = make_hyperbolic();
    auto tab = tabulate(*hy, 8.0, 1e-3, 100.0, 2048);
    CHECK(tab->family() == Family::tabulated);
    for (double r : {0.3, 1.7, 4.9, 20.0}) {
        CHECK(tab->eval(r).psi == doctest::Approx(hy->eval(r).psi).epsilon(1e-8));
        CHECK(tab->eval(r).dpsi == doctest::Approx(hy->eval(r).dpsi).epsilon(1e-7));
    }
    auto sp = make_shifted_power(2.0);
    auto tsp = tabulate(*sp, 8.0, 1e-3, 1000.0);
    for (double r : {0.3, 20.0, 600.0})
        CHECK(tsp->eval(r).psi == doctest::Approx(sp->eval(r).psi).epsilon(1e-8));
}

TEST_CASE("family names round-trip") {
    for (Family f : {Family::euclidean, Family::hyperbolic, Family::shifted_power,
                     Family::arctan_family, Family::f_family, Family::piecewise_sinh_power,
                     Family::comparison, Family::tabulated})
        CHECK(family_from_name(family_name(f)) == f);
    CHECK_THROWS_AS(family_from_name("nope"), std::invalid_argument);
}
