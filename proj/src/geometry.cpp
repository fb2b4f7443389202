#include "nemlat/geometry.hpp"

#include <cmath>

namespace nemlat {

double polygon_area(const Polygon& p) {
    double s = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const Point& a = p[k];
        const Point& b = p[(k + 1) % p.size()];
        s += a[0] * b[1] - b[0] * a[1];
    }
    return 0.5 * std::fabs(s);
}

namespace {

// keep the side a.x + b.y <= c
Polygon clip_half(const Polygon& poly, double a, double b, double c) {
    Polygon out;
    const std::size_t n = poly.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Point& P = poly[k];
        const Point& Q = poly[(k + 1) % n];
        double fp = a * P[0] + b * P[1] - c, fq = a * Q[0] + b * Q[1] - c;
        if (fp <= 0) out.push_back(P);
        if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) {
            double t = fp / (fp - fq);
            out.push_back({P[0] + t * (Q[0] - P[0]), P[1] + t * (Q[1] - P[1])});
        }
    }
    return out;
}

}  // namespace

Polygon clip(const Polygon& p, const Rect& r) {
    Polygon out = clip_half(p, 1, 0, r.x1);
    if (!out.empty()) out = clip_half(out, -1, 0, -r.x0);
    if (!out.empty()) out = clip_half(out, 0, 1, r.y1);
    if (!out.empty()) out = clip_half(out, 0, -1, -r.y0);
    return out;
}

Polygon clip(const Polygon& p, const Polygon& convex) {
    Polygon out = p;
    const std::size_t n = convex.size();
    for (std::size_t k = 0; k < n && !out.empty(); ++k) {
        const Point& A = convex[k];
        const Point& B = convex[(k + 1) % n];
        // inside is to the left of A->B
        double a = B[1] - A[1], b = A[0] - B[0];
        out = clip_half(out, a, b, a * A[0] + b * A[1]);
    }
    return out;
}

Polygon square_cell(const Point& c, double half) {
    return {{c[0] - half, c[1] - half}, {c[0] + half, c[1] - half}, {c[0] + half, c[1] + half}, {c[0] - half, c[1] + half}};
}

Polygon diamond_cell(const Point& c, double radius) {
    return {{c[0] + radius, c[1]}, {c[0], c[1] + radius}, {c[0] - radius, c[1]}, {c[0], c[1] - radius}};
}

double integrate_quadratic(const Polygon& p, const std::function<double(const Point&)>& f) {
    if (p.size() < 3) return 0.0;
    double s = 0;
    for (std::size_t k = 1; k + 1 < p.size(); ++k) {
        const Point &A = p[0], &B = p[k], &C = p[k + 1];
        double area = 0.5 * std::fabs((B[0] - A[0]) * (C[1] - A[1]) - (C[0] - A[0]) * (B[1] - A[1]));
        if (area == 0) continue;
        Point m1{0.5 * (A[0] + B[0]), 0.5 * (A[1] + B[1])};
        Point m2{0.5 * (B[0] + C[0]), 0.5 * (B[1] + C[1])};
        Point m3{0.5 * (C[0] + A[0]), 0.5 * (C[1] + A[1])};
        s += area / 3.0 * (f(m1) + f(m2) + f(m3));
    }
    return s;
}

}  // namespace nemlat
