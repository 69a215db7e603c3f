#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "relaystab/hull.hpp"
#include "relaystab/rng.hpp"

using namespace relaystab;

TEST_CASE("square with interior points") {
    std::vector<Point2> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.2, 0.7}};
    const auto h = convex_hull(pts);
    CHECK(h.size() == 4);
    for (const auto& p : pts) CHECK(hull_contains(h, p));
    CHECK_FALSE(hull_contains(h, {1.2, 0.5}));
}

TEST_CASE("collinear points collapse to a segment") {
    std::vector<Point2> pts{{0, 0}, {0.5, 0.5}, {1, 1}, {0.25, 0.25}};
    const auto h = convex_hull(pts);
    CHECK(h.size() == 2);
    CHECK(hull_contains(h, {0.75, 0.75}));
    CHECK_FALSE(hull_contains(h, {0.5, 0.6}));
}

TEST_CASE("degenerate inputs") {
    CHECK(convex_hull({}).empty());
    const auto one = convex_hull({{0.3, 0.4}});
    CHECK(one.size() == 1);
    CHECK(hull_contains(one, {0.3, 0.4}));
    const auto dup = convex_hull({{0.3, 0.4}, {0.3, 0.4}});
    CHECK(dup.size() == 1);
}

TEST_CASE("hull contains every input point") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Point2> pts;
        for (int k = 0; k < 60; ++k) pts.push_back({rng.uniform(), rng.uniform()});
        const auto h = convex_hull(pts);
        CHECK(h.size() >= 3);
        for (const auto& p : pts) CHECK(hull_contains(h, p));
    }
}
