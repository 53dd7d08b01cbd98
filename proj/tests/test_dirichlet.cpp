#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lem/dirichlet.hpp"
#include "lem/model.hpp"

using namespace lem;

TEST_CASE("ball solution hits the requested radius with a clean zero") {
    auto hy = manifold::make_hyperbolic();
    auto s = dirichlet::dirichlet_solution(hy, 3, 2.0, 1.0, 0.5, 1000.0);
    CHECK(s.R == 1.0);
    CHECK(s.a > 0.0);
    CHECK(std::abs(s.trajectory.r_event - 1.0) < 1e-8);
    CHECK(s.zero_residual < 1e-9);
    CHECK(s.mass > 0.0);
    CHECK(s.sobolev_quotient > 0.0);
    // interior positivity of the ball solution
    for (std::size_t i = 0; i + 1 < s.trajectory.u.size(); ++i) CHECK(s.trajectory.u[i] > 0.0);
}

TEST_CASE("ball solver validates its inputs and brackets") {
    auto eu = manifold::make_euclidean();
    CHECK_THROWS_AS(dirichlet::dirichlet_solution(eu, 3, 3.0, -1.0, 0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(dirichlet::dirichlet_solution(eu, 3, 3.0, 1.0, 1.0, 0.1), std::invalid_argument);
    // both ends of this bracket have rho far above R = 0.1: no sign change
    CHECK_THROWS_AS(dirichlet::dirichlet_solution(eu, 3, 3.0, 0.1, 0.2, 0.4), std::invalid_argument);
}

TEST_CASE("euclidean cubic branch is strictly monotone and scale-exact") {
    auto eu = manifold::make_euclidean();
    auto b = dirichlet::branch_trace(eu, 3, 3.0, 0.5, 8.0, 16, 100.0);
    REQUIRE(b.points.size() == 16);
    CHECK(b.monotone_violations.empty());
    for (std::size_t i = 0; i < b.points.size(); ++i) {
        const auto& pt = b.points[i];
        REQUIRE(pt.rho.has_value());
        CHECK(pt.u0_check < 1e-10);
        if (i > 0) {
            CHECK(pt.a > b.points[i - 1].a);
            CHECK(*pt.rho < *b.points[i - 1].rho);
        }
    }
    // q=3 scaling law: rho(a) * a is constant along the branch
    double c0 = b.points.front().a * *b.points.front().rho;
    for (const auto& pt : b.points)
        CHECK(pt.a * *pt.rho == doctest::Approx(c0).epsilon(1e-6));

    bool warn = true;
    auto triples = dirichlet::detect_nonuniqueness(b, &warn);
    CHECK(triples.empty());
    CHECK_FALSE(warn);
}

TEST_CASE("branch handles heights whose solutions never vanish") {
    auto hy = manifold::make_hyperbolic();
    auto b = dirichlet::branch_trace(hy, 3, 2.0, 0.01, 50.0, 12, 30.0);
    REQUIRE(b.points.size() == 12);
    bool seen_absent = false, seen_present = false;
    for (const auto& pt : b.points) {
        if (pt.rho)
            seen_present = true;
        else {
            seen_absent = true;
            CHECK_FALSE(seen_present);  // absent entries sit below the threshold height
        }
    }
    CHECK(seen_absent);
    CHECK(seen_present);
    CHECK(b.monotone_violations.empty());
}

TEST_CASE("branch is deterministic across thread counts") {
    auto eu = manifold::make_euclidean();
    auto b1 = dirichlet::branch_trace(eu, 3, 3.0, 0.5, 4.0, 10, 60.0, {}, 1);
    auto b3 = dirichlet::branch_trace(eu, 3, 3.0, 0.5, 4.0, 10, 60.0, {}, 3);
    REQUIRE(b1.points.size() == b3.points.size());
    for (std::size_t i = 0; i < b1.points.size(); ++i) {
        CHECK(b1.points[i].a == b3.points[i].a);
        REQUIRE(b1.points[i].rho.has_value() == b3.points[i].rho.has_value());
        if (b1.points[i].rho) CHECK(*b1.points[i].rho == *b3.points[i].rho);
    }
}

TEST_CASE("claims report inverts the branch consistently") {
    auto eu = manifold::make_euclidean();
    auto rep = dirichlet::branch_claims_report(eu, 3, 3.0, {1.5, 2.0}, 0.5, 8.0, 12, 128);
    REQUIRE(rep.rows.size() == 2);
    for (const auto& row : rep.rows) {
        CHECK(row.root_count == 1);
        CHECK(row.I_R > 0.0);
        CHECK(row.A_R > 0.0);
        CHECK(row.mass > 0.0);
    }
    CHECK(rep.A_decreasing);
    CHECK(rep.I_nonincreasing);
    CHECK_FALSE(rep.multivalued);
    // A(R) = const / R for the cubic euclidean branch
    double p0 = rep.rows[0].A_R * rep.rows[0].R;
    double p1 = rep.rows[1].A_R * rep.rows[1].R;
    CHECK(p0 == doctest::Approx(p1).epsilon(1e-6));
}

TEST_CASE("branch input validation") {
    auto eu = manifold::make_euclidean();
    CHECK_THROWS_AS(dirichlet::branch_trace(eu, 3, 3.0, 1.0, 0.5, 8, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(dirichlet::branch_trace(eu, 3, 3.0, 0.5, 1.0, 1, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(dirichlet::branch_claims_report(eu, 3, 3.0, {}), std::invalid_argument);
    CHECK_THROWS_AS(dirichlet::branch_claims_report(eu, 3, 3.0, {2.0, 1.0}), std::invalid_argument);
}
