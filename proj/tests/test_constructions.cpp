#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "lem/constructions.hpp"
#include "lem/model.hpp"

using namespace lem;
using namespace lem::constructions;

namespace {

// one pipeline run shared by all the stage tests below
const GluedArtifact& artifact() {
    static const GluedArtifact g = build_glued_manifold(3, 2.0, 2.0);
    return g;
}

}  // namespace

TEST_CASE("supersolution constants land on their closed-form values") {
    auto sp = manifold::make_shifted_power(2.0);
    auto s = build_supersolution(*sp, 3, 2.0, 2.0);
    // eps_max = alpha - (2q/(q-1) - 1)/(n-1) = 1/2, used at half strength
    CHECK(s.eps == 0.25);
    // A^{q-1} carries a 10% slack below the borderline constant
    CHECK(s.A == doctest::Approx(0.9).epsilon(1e-12));
    // r_eps solves r psi'/psi = alpha - eps: (1+r)/(1+r/2) = 7/4 at r = 6
    CHECK(s.r_eps == doctest::Approx(6.0).epsilon(1e-9));
    CHECK(s.B == doctest::Approx(252.0).epsilon(1e-8));
    CHECK(s.rounds == 0);
    CHECK(s.min_residual >= 0.0);

    // w and dw are mutually consistent
    for (double r : {0.3, 2.0, 17.0, 400.0}) {
        double h = 1e-5 * std::max(1.0, r);
        double fd = (s.w(r + h) - s.w(r - h)) / (2.0 * h);
        CHECK(fd == doctest::Approx(s.dw(r)).epsilon(1e-7));
    }
    CHECK(s.w(0.0) == doctest::Approx(s.A * std::pow(s.B, -1.0)).epsilon(1e-14));
}

TEST_CASE("supersolution verifier rejects an inflated amplitude") {
    auto sp = manifold::make_shifted_power(2.0);
    auto s = build_supersolution(*sp, 3, 2.0, 2.0);
    CHECK(supersolution_min_residual(*sp, 3, 2.0, s.A, s.B) >= 0.0);
    CHECK(supersolution_min_residual(*sp, 3, 2.0, 4.0 * s.A, s.B) < 0.0);
}

TEST_CASE("supersolution preconditions") {
    auto sp = manifold::make_shifted_power(2.0);
    // q at the lower critical exponent leaves no tail-rate margin
    CHECK_THROWS_AS(build_supersolution(*sp, 3, 2.0, 5.0 / 3.0), std::invalid_argument);
    auto eu = manifold::make_euclidean();
    CHECK_THROWS_AS(build_supersolution(*eu, 3, 1.0, 2.0), std::invalid_argument);
    // explicit margin beyond the admissible window
    CHECK_THROWS_AS(build_supersolution(*sp, 3, 2.0, 2.0, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(build_supersolution(*sp, 3, 2.0, 2.0, -0.1), std::invalid_argument);
}

TEST_CASE("power tail solves its defining equation exactly") {
    auto t = w2_tail(3, 2.0, 2.0, -0.5);
    CHECK(t.c == 2.0);  // [2/(q-1) (alpha(n-1) - (q+1)/(q-1))]^{1/(q-1)}
    CHECK(t.max_check_residual < 1e-10);

    auto t2 = w2_tail(2, 3.0, 3.0, 0.0);
    CHECK(t2.c == doctest::Approx(1.0).epsilon(1e-14));

    // independent residual check from the returned jets
    for (double off : {1e-2, 1.0, 40.0}) {
        double r = t.r0 + off;
        double lhs = -t.ddw(r) - 2.0 * (2.0 / (r - t.r0)) * t.dw(r);
        double rhs = std::pow(t.w(r), 2.0);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
    }
    CHECK_THROWS_AS(w2_tail(3, 0.5, 2.0, 0.0), std::invalid_argument);
}

TEST_CASE("lipschitz glue is tangent and convexity-ordered at the contact radius") {
    const auto& g = artifact().lip;
    CHECK(g.n == 3);
    CHECK(g.q == 2.0);
    CHECK(g.r_tilde < g.r_bar);
    CHECK(g.r_bar > 0.0);
    CHECK(g.r_bar < 1.0);
    CHECK(g.kappa > 0.0);
    CHECK(g.c == 2.0);
    CHECK(g.a_ball > 0.0);
    CHECK(g.tangency_gap < 1e-8);
    CHECK(g.slope_gap < 1e-6);
    CHECK(g.curvature_jump >= 0.0);

    // the glued solution is continuous with matching slope across r_bar
    double lo = g.u(g.r_bar - 1e-9), hi = g.u(g.r_bar + 1e-9);
    CHECK(std::abs(lo - hi) < 1e-6);
    CHECK(g.du(g.r_bar - 1e-7) == doctest::Approx(g.du(g.r_bar + 1e-7)).epsilon(1e-4));
    CHECK(g.u(0.0) == doctest::Approx(g.a_ball).epsilon(1e-9));

    // weight: sinh core, power beyond
    CHECK(g.psi_bar->eval(0.5 * g.r_bar).psi ==
          doctest::Approx(std::sinh(0.5 * g.r_bar)).epsilon(1e-12));
    CHECK(g.psi_bar->eval(2.0).psi ==
          doctest::Approx(g.kappa * std::pow(2.0 - g.r_tilde, 2.0)).epsilon(1e-12));
}

TEST_CASE("glue validates the exponent window") {
    CHECK_THROWS_AS(glue(3, 2.0, 3.0), std::invalid_argument);   // above two_star_alpha - 1
    CHECK_THROWS_AS(glue(3, 2.0, 1.5), std::invalid_argument);   // below two_tilde
}

TEST_CASE("c1 stage produces a convex profile with the predicted transform slope") {
    const auto& c1 = artifact().c1;
    CHECK(c1.width == 0.0);
    CHECK(c1.eps > 0.0);
    CHECK(c1.A == 1.0);  // (q-1)^2 / (alpha(n-1)(q-1) - (q+1))
    CHECK(c1.A_tilde > c1.A);
    CHECK(c1.K > 0.0);
    CHECK(c1.r_bar == artifact().lip.r_bar);

    // transform curvature is continuous at both ends of the correction piece
    for (double j : {c1.jump1(), c1.jump2()}) {
        double below = c1.ddF(j - 1e-7), above = c1.ddF(j + 1e-7);
        CHECK(below == doctest::Approx(above).epsilon(1e-4));
        CHECK(c1.u(j - 1e-9) == doctest::Approx(c1.u(j + 1e-9)).epsilon(1e-8));
    }

    // below the contact radius the profile keeps the ball solution
    double rb = 0.6 * c1.r_bar;
    CHECK(c1.u(rb) == doctest::Approx(artifact().lip.u(rb)).epsilon(1e-12));
    CHECK(c1.psi(rb) == doctest::Approx(std::sinh(rb)).epsilon(1e-12));
}

TEST_CASE("curvature functional agrees with the direct weight jets") {
    const auto& f = artifact().final;
    for (double r : {0.05, 0.2, 0.45, 2.0, 5.0, 50.0, 500.0}) {
        if (std::abs(r - f.jump1()) < 4.0 * f.width) continue;
        double lhs = f.G_value(r);
        double rhs = 4.0 * f.ddpsi(r) / f.psi(r);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    }
}

TEST_CASE("smooth stage mollifies only inside its windows") {
    const auto& c1 = artifact().c1;
    const auto& f = artifact().final;
    CHECK(f.width > 0.0);
    CHECK(f.width < c1.eps / 4.0);
    CHECK(f.min_G > 0.0);
    CHECK(f.K > 0.0);
    CHECK(f.eps == c1.eps);

    // bitwise identical outside the two blend windows
    for (double r : {f.jump1() - 3.0 * f.width, f.jump1() + 0.5 * f.eps,
                     f.jump2() + 3.0 * f.width, 0.25, 10.0, 1000.0}) {
        CHECK(f.u(r) == c1.u(r));
        CHECK(f.F(r) == c1.F(r));
    }
    // and genuinely different at the former kink
    CHECK(std::abs(f.ddF(f.jump1()) - c1.ddF(f.jump1())) > 0.0);
}

TEST_CASE("final profile solves the equation it was built from") {
    const auto& f = artifact().final;
    for (double r : {0.5, 2.0, 20.0, 200.0}) {
        double res = -f.ddu(r) - 2.0 * (f.dpsi(r) / f.psi(r)) * f.du(r) -
                     std::pow(std::abs(f.u(r)), 2.0);
        CHECK(std::abs(res) / std::max(1.0, std::pow(f.u(r), 2.0)) < 1e-8);
    }
    // tail behavior: psi' r / psi -> alpha and u ~ r^{-2}
    for (double r : {2.5e3, 1e4}) {
        CHECK(f.dpsi(r) * r / f.psi(r) == doctest::Approx(2.0).epsilon(0.02));
    }
    double ratio = f.u(2000.0) / f.u(1000.0);
    CHECK(std::log(ratio) / std::log(2.0) == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(f.kappa_tail > 0.0);
}

TEST_CASE("tabulated snapshot of the final profile passes validation") {
    const auto& art = artifact();
    auto tab = art.psi_final;
    REQUIRE(tab);
    CHECK(tab->family() == manifold::Family::tabulated);
    CHECK(tab->alpha().value() == 2.0);
    auto rep = manifold::validate_profile(*tab, 1e4);
    CHECK(rep.pole_ok);
    CHECK(rep.positive_ok);
    CHECK(rep.alpha_ok);
    for (double r : {0.3, 1.0, 7.0, 300.0}) {
        CHECK(tab->eval(r).psi == doctest::Approx(art.final.psi(r)).epsilon(1e-7));
        CHECK(tab->eval(r).dpsi == doctest::Approx(art.final.dpsi(r)).epsilon(1e-6));
    }
}

TEST_CASE("glued weight escapes the monotonicity obstruction") {
    // the rate-bound multiplier must fail somewhere, otherwise the branch
    // scan downstream could never see a non-monotone first-zero map
    const auto& art = artifact();
    auto rep = manifold::check_rate_bound(*art.psi_final, 3, 2.0, 50.0, 4096);
    CHECK_FALSE(rep.holds);
    CHECK(rep.margin < 0.0);
    CHECK(rep.worst_r > 0.0);
}

TEST_CASE("c1 stage rejects nonsensical explicit spans") {
    const auto& g = artifact().lip;
    CHECK_THROWS_AS(smooth_c1(g, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(smooth_c1(g, 0.0), std::invalid_argument);
    const auto& c1 = artifact().c1;
    CHECK_THROWS_AS(smooth_cinf(c1, c1.eps), std::invalid_argument);  // width must stay below eps/4
    CHECK_THROWS_AS(smooth_cinf(c1, -1.0), std::invalid_argument);
}
