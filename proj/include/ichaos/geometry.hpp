// Plane geometry primitives shared by every module.
#pragma once

#include <algorithm>
#include <cmath>

namespace ichaos {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double dist(Point a, Point b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline double dist2(Point a, Point b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// Axis-aligned square centered at `center` with halfside r; side length 2r.
struct SquareQuery {
    Point center;
    double r = 0.0;
};

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    bool contains(Point p) const {
        return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    }
};

inline Rect rect_of(SquareQuery q) {
    return {q.center.x - q.r, q.center.y - q.r, q.center.x + q.r, q.center.y + q.r};
}

inline bool inside_open_unit_square(Point p) {
    return p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0;
}

}  // namespace ichaos
