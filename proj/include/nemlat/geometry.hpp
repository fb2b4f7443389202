#pragma once

#include <array>
#include <functional>
#include <vector>

namespace nemlat {

using Point = std::array<double, 2>;
using Polygon = std::vector<Point>;

struct Rect {
    double x0, y0, x1, y1;
    double area() const { return (x1 - x0) * (y1 - y0); }
    bool contains(const Point& p, double tol = 0.0) const {
        return p[0] >= x0 - tol && p[0] <= x1 + tol && p[1] >= y0 - tol && p[1] <= y1 + tol;
    }
};

double polygon_area(const Polygon& p);
// Sutherland-Hodgman against a rectangle or a convex polygon (counter-clockwise)
Polygon clip(const Polygon& p, const Rect& r);
Polygon clip(const Polygon& p, const Polygon& convex);
Polygon square_cell(const Point& c, double half);
Polygon diamond_cell(const Point& c, double radius);
// exact for polynomials of degree <= 2 (edge-midpoint rule on a fan)
double integrate_quadratic(const Polygon& p, const std::function<double(const Point&)>& f);

}  // namespace nemlat
