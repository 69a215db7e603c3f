#pragma once

#include <vector>

namespace relaystab {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

// Andrew monotone chain; returns the hull counterclockwise without repeating
// the first point. Degenerate inputs (< 3 distinct points, collinear sets)
// return the extreme points.
std::vector<Point2> convex_hull(std::vector<Point2> pts);

bool hull_contains(const std::vector<Point2>& hull, const Point2& p, double eps = 1e-9);

}  // namespace relaystab
