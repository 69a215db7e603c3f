#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "relaystab/ip_solver.hpp"

using namespace relaystab;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("tiny LP lands on the hand-solved vertex") {
    // min -x - 0.1 y  s.t.  x + y <= 1,  x - y <= 0.5,  0 <= x,y <= 1
    // active set {x+y=1, x-y=0.5} -> (0.75, 0.25)
    ConvexProgram p;
    p.c = Eigen::Vector2d(-1.0, -0.1);
    p.lb = Eigen::Vector2d(0.0, 0.0);
    p.ub = Eigen::Vector2d(1.0, 1.0);
    {
        ConvexProgram::Constraint c;
        c.q = Eigen::Vector2d(1.0, 1.0);
        c.r = -1.0;
        p.constraints.push_back(c);
    }
    {
        ConvexProgram::Constraint c;
        c.q = Eigen::Vector2d(1.0, -1.0);
        c.r = -0.5;
        p.constraints.push_back(c);
    }
    const auto r = solve_convex(p, Eigen::Vector2d(0.1, 0.1));
    REQUIRE(r.converged);
    CHECK(r.x[0] == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(r.kkt_residual <= 1e-7);
    CHECK(r.feasible);
}

TEST_CASE("quadratic ball constraint pushes to the analytic boundary point") {
    // min c.x s.t. |x - x0|^2 <= 0.04  ->  x = x0 - 0.2 c/|c|
    ConvexProgram p;
    p.c = Eigen::Vector2d(1.0, 2.0);
    p.lb = Eigen::Vector2d(-10.0, -10.0);
    p.ub = Eigen::Vector2d(10.0, 10.0);
    ConvexProgram::Constraint c;
    c.P = Eigen::Matrix2d::Identity() * 2.0;
    c.q = Eigen::Vector2d(-2.0 * 0.5, -2.0 * 0.5);
    c.r = 0.5 * 0.5 * 2 - 0.04;  // |x - (0.5,0.5)|^2 - 0.04
    p.constraints.push_back(c);
    const auto r = solve_convex(p, Eigen::Vector2d(0.5, 0.5));
    REQUIRE(r.converged);
    const Eigen::Vector2d dir = Eigen::Vector2d(1.0, 2.0).normalized();
    CHECK(r.x[0] == doctest::Approx(0.5 - 0.2 * dir[0]).epsilon(1e-5));
    CHECK(r.x[1] == doctest::Approx(0.5 - 0.2 * dir[1]).epsilon(1e-5));
    CHECK(r.kkt_residual <= 1e-7);
}

TEST_CASE("phase-I recovers from an infeasible hint") {
    // feasible set is a narrow band away from the hint
    ConvexProgram p;
    p.c = Eigen::Vector2d(0.0, 1.0);
    p.lb = Eigen::Vector2d(0.0, 0.0);
    p.ub = Eigen::Vector2d(1.0, 1.0);
    ConvexProgram::Constraint c;
    c.q = Eigen::Vector2d(-1.0, 0.0);
    c.r = 0.8;  // x >= 0.8
    p.constraints.push_back(c);
    const auto r = solve_convex(p, Eigen::Vector2d(0.1, 0.9));
    REQUIRE(r.converged);
    CHECK(r.x[0] >= 0.8 - 1e-9);
    CHECK(r.x[1] <= 1e-5);
    CHECK(r.feasible);
}

TEST_CASE("fixed variables are eliminated") {
    ConvexProgram p;
    p.c = Eigen::Vector3d(-1.0, 5.0, 0.0);
    p.lb = Eigen::Vector3d(0.0, 0.0, 0.3);
    p.ub = Eigen::Vector3d(1.0, 0.0, 0.3);  // vars 1 and 2 pinned
    ConvexProgram::Constraint c;
    c.q = Eigen::Vector3d(1.0, 1.0, 1.0);
    c.r = -1.0;
    p.constraints.push_back(c);
    const auto r = solve_convex(p, Eigen::Vector3d(0.1, 0.0, 0.3));
    REQUIRE(r.converged);
    CHECK(r.x[1] == 0.0);
    CHECK(r.x[2] == doctest::Approx(0.3));
    CHECK(r.x[0] == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("unbounded-above slack variables are handled") {
    // min x + 100 s  s.t.  0.5 - x <= s, s >= 0, 0 <= x <= 0.2: s picks up 0.3
    ConvexProgram p;
    p.c = Eigen::Vector2d(1.0, 100.0);
    p.lb = Eigen::Vector2d(0.0, 0.0);
    p.ub = Eigen::Vector2d(0.2, kInf);
    ConvexProgram::Constraint c;
    c.q = Eigen::Vector2d(-1.0, -1.0);
    c.r = 0.5;
    p.constraints.push_back(c);
    const auto r = solve_convex(p, Eigen::Vector2d(0.1, 1.0));
    REQUIRE(r.converged);
    CHECK(r.x[0] == doctest::Approx(0.2).epsilon(1e-5));
    CHECK(r.x[1] == doctest::Approx(0.3).epsilon(1e-5));
    CHECK(r.kkt_residual <= 1e-7);
}
