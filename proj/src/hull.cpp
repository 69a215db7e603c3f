#include "relaystab/hull.hpp"

#include <algorithm>
#include <cmath>

namespace relaystab {

namespace {
double cross(const Point2& o, const Point2& a, const Point2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}
}  // namespace

std::vector<Point2> convex_hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point2& a, const Point2& b) {
                              return a.x == b.x && a.y == b.y;
                          }),
              pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return pts;

    std::vector<Point2> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {  // lower
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

bool hull_contains(const std::vector<Point2>& hull, const Point2& p, double eps) {
    if (hull.empty()) return false;
    if (hull.size() == 1)
        return std::abs(p.x - hull[0].x) <= eps && std::abs(p.y - hull[0].y) <= eps;
    if (hull.size() == 2) {
        // on the segment, within eps
        const double c = cross(hull[0], hull[1], p);
        const double dx = hull[1].x - hull[0].x, dy = hull[1].y - hull[0].y;
        const double len = std::sqrt(dx * dx + dy * dy);
        if (len == 0.0) return hull_contains({hull[0]}, p, eps);
        if (std::abs(c) / len > eps) return false;
        const double dot = (p.x - hull[0].x) * dx + (p.y - hull[0].y) * dy;
        return dot >= -eps * len && dot <= len * len + eps * len;
    }
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point2& a = hull[i];
        const Point2& b = hull[(i + 1) % hull.size()];
        const double dx = b.x - a.x, dy = b.y - a.y;
        const double len = std::max(1e-300, std::sqrt(dx * dx + dy * dy));
        if (cross(a, b, p) < -eps * len) return false;  // hull is CCW
    }
    return true;
}

}  // namespace relaystab
