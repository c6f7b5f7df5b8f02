#include <doctest.h>

#include "oracles.hpp"
#include "wellsep/errors.hpp"
#include "wellsep/lp.hpp"

using namespace wellsep;

TEST_CASE("generic simplex") {
    // min x + 2y  s.t. x + y = 1  -> x = 1
    auto s = solve_equality_lp({{1, 1}}, {1}, {1, 2});
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.objective == doctest::Approx(1.0));
    CHECK(s.x[0] == doctest::Approx(1.0));

    CHECK(solve_equality_lp({{1, 1}}, {-1}, {1, 1}).status == LpStatus::infeasible);
    // min -x s.t. x - y = 0 is unbounded
    CHECK(solve_equality_lp({{1, -1}}, {0}, {-1, 0}).status == LpStatus::unbounded);
}

TEST_CASE("assignment LP values") {
    const auto r0 = solve_assignment_lp(2, 0.0);
    CHECK(r0.primal_objective == doctest::Approx(0.5).epsilon(1e-12));

    const auto r1 = solve_assignment_lp(2, 0.1);
    CHECK(r1.primal_objective == doctest::Approx(0.55).epsilon(1e-12));
    CHECK(r1.stated_dual.feasible);
    CHECK(r1.stated_dual.u[0] == 0.0);
    CHECK(r1.stated_dual.u[1] == 0.5);
    CHECK(r1.stated_dual.value == doctest::Approx(0.55));

    const auto r3 = solve_assignment_lp(3, 0.12);
    CHECK(r3.primal_objective == doctest::Approx(0.58).epsilon(1e-12));
    REQUIRE(r3.stated_dual.residuals.size() == 5);
    // A^T u - c for u = (-1, 2/3): (-1, -1/3, 1/3, 1, -2/3) - (0, 0, 1/3, 1, 0)
    CHECK(r3.stated_dual.residuals[0] == doctest::Approx(-1.0));
    CHECK(r3.stated_dual.residuals[1] == doctest::Approx(-1.0 / 3));
    CHECK(r3.stated_dual.residuals[2] == doctest::Approx(0.0));
    CHECK(r3.stated_dual.residuals[3] == doctest::Approx(0.0));
    CHECK(r3.stated_dual.residuals[4] == doctest::Approx(-2.0 / 3));
    CHECK(r3.claimed_bound == doctest::Approx(0.62));
    CHECK(r3.closed_form == doctest::Approx(0.58));
}

TEST_CASE("assignment LP against basis enumeration") {
    for (std::size_t k = 2; k <= 10; ++k)
        for (double g2 : {0.0, 0.01, 0.1, 0.3}) {
            const auto r = solve_assignment_lp(k, g2);
            const auto ref = oracle::assignment_lp_min(k, g2);
            REQUIRE(ref);
            REQUIRE(r.feasible);
            CHECK(std::abs(r.primal_objective - *ref) <= 1e-9);
            CHECK(r.duality_gap <= 1e-9);
            CHECK(r.stated_dual.max_violation <= 1e-12);
            CHECK(std::abs(r.primal_objective - r.stated_dual.value) <= 1e-9);
            CHECK(std::abs(r.claimed_bound - r.closed_form - g2 / k) <= 1e-12);
        }
}

TEST_CASE("assignment LP errors") {
    CHECK_THROWS_AS(solve_assignment_lp(1, 0.0), ArgumentError);
    CHECK_THROWS_AS(solve_assignment_lp(3, -0.1), ArgumentError);
    // rhs = k(2k-3)/(2k-2) + gamma2 > k makes the primal infeasible
    const auto r = solve_assignment_lp(2, 2.0);
    CHECK_FALSE(r.feasible);
    CHECK_FALSE(r.infeasibility.empty());
    CHECK_FALSE(oracle::assignment_lp_min(2, 2.0));
}
