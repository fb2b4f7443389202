#include "nemlat/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "nemlat/errors.hpp"
#include "nemlat/summation.hpp"

namespace nemlat {

Grid2::Grid2(const Rect& domain, double eps) : domain_(domain), eps_(eps) {
    if (!(eps > 0) || !std::isfinite(eps)) throw DegenerateGrid("lattice spacing must be positive");
    if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0)) throw DegenerateGrid("degenerate rectangle");
    const double tol = 1e-9;
    i0_ = int(std::ceil(domain.x0 / eps - tol));
    i1_ = int(std::floor(domain.x1 / eps + tol));
    j0_ = int(std::ceil(domain.y0 / eps - tol));
    j1_ = int(std::floor(domain.y1 / eps + tol));
    if (i1_ < i0_ || j1_ < j0_) throw DegenerateGrid("no lattice site inside the domain");
}

bool Grid2::same_as(const Grid2& o) const {
    return eps_ == o.eps_ && i0_ == o.i0_ && i1_ == o.i1_ && j0_ == o.j0_ && j1_ == o.j1_ &&
           domain_.x0 == o.domain_.x0 && domain_.x1 == o.domain_.x1 && domain_.y0 == o.domain_.y0 &&
           domain_.y1 == o.domain_.y1;
}

Grid2 build_grid(const Rect& domain, double eps) { return Grid2(domain, eps); }

DirectorField2::DirectorField2(const Grid2& g, std::vector<Director2> values) : grid(g), u(std::move(values)) {
    if (u.size() != grid.size()) throw IncompatibleFields("one director per site required");
}

DirectorField2 field_from_angle(const Grid2& g, const std::function<double(const Point&)>& theta) {
    std::vector<Director2> u;
    u.reserve(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) u.push_back(Director2::from_angle(theta(g.position(k))));
    return DirectorField2(g, std::move(u));
}

DirectorField2 field_from_angles(const Grid2& g, const std::vector<double>& theta) {
    if (theta.size() != g.size()) throw IncompatibleFields("one angle per site required");
    std::vector<Director2> u;
    u.reserve(g.size());
    for (double t : theta) u.push_back(Director2::from_angle(t));
    return DirectorField2(g, std::move(u));
}

PCQField::PCQField(const Grid2& g, std::vector<QTensor2> values) : grid(g), q(std::move(values)) {
    if (q.size() != grid.size()) throw IncompatibleFields("one tensor per site required");
}

PCQField pc_field(const DirectorField2& f) {
    std::vector<QTensor2> q;
    q.reserve(f.u.size());
    for (const auto& u : f.u) q.push_back(q_of(u));
    return PCQField(f.grid, std::move(q));
}

DualQField dual_interpolate(const PCQField& f) {
    DualQField d{f.grid, {}};
    const Grid2& g = f.grid;
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto [i, j] = g.site(k);
        for (auto [di, dj] : {std::pair{1, 0}, std::pair{0, 1}}) {
            long n = g.index(i + di, j + dj);
            if (n < 0) continue;
            const Sym2& a = f.q[k].mat();
            const Sym2& b = f.q[std::size_t(n)].mat();
            Point p{g.eps() * (i + 0.5 * di), g.eps() * (j + 0.5 * dj)};
            d.nodes.push_back({p, k, std::size_t(n), QTensor2(0.5 * (a.a + b.a), 0.5 * (a.b + b.b), 0.5 * (a.c + b.c))});
        }
    }
    return d;
}

namespace {

Rect intersect(const Rect& a, const Rect& b) {
    return {std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1), std::min(a.y1, b.y1)};
}

void add_weighted(Accumulator (&acc)[3], const Sym2& m, double w) {
    acc[0].add(w * m.a);
    acc[1].add(w * m.b);
    acc[2].add(w * m.c);
}

}  // namespace

Sym2 pc_average(const PCQField& f, const Rect& r) {
    const Grid2& g = f.grid;
    double h = 0.5 * g.eps();
    Accumulator acc[3];
    for (std::size_t k = 0; k < g.size(); ++k) {
        Point c = g.position(k);
        Rect cell = intersect({c[0] - h, c[1] - h, c[0] + h, c[1] + h}, g.domain());
        Rect part = intersect(cell, r);
        if (part.x1 <= part.x0 || part.y1 <= part.y0) continue;
        add_weighted(acc, f.q[k].mat(), part.area());
    }
    double a = r.area();
    return {acc[0].value() / a, acc[1].value() / a, acc[2].value() / a};
}

Sym2 dual_average(const DualQField& f, const Rect& r) {
    double h = 0.5 * f.grid.eps();
    Accumulator acc[3];
    for (const auto& n : f.nodes) {
        if (n.position[0] + h < r.x0 || n.position[0] - h > r.x1 || n.position[1] + h < r.y0 ||
            n.position[1] - h > r.y1)
            continue;
        Polygon p = clip(clip(diamond_cell(n.position, h), f.grid.domain()), r);
        if (p.size() < 3) continue;
        add_weighted(acc, n.q.mat(), polygon_area(p));
    }
    double a = r.area();
    return {acc[0].value() / a, acc[1].value() / a, acc[2].value() / a};
}

Mesh triangulate(const Grid2& g) {
    Mesh m;
    m.points.reserve(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) m.points.push_back(g.position(k));
    for (int j = g.j_min(); j < g.j_max(); ++j)
        for (int i = g.i_min(); i < g.i_max(); ++i) {
            auto a = std::size_t(g.index(i, j)), b = std::size_t(g.index(i + 1, j)), c = std::size_t(g.index(i, j + 1)),
                 d = std::size_t(g.index(i + 1, j + 1));
            m.tris.push_back({a, b, c});
            m.tris.push_back({d, c, b});
        }
    return m;
}

Mesh triangulate_sublattice(const Grid2& g, Parity p) {
    Mesh m;
    m.points.reserve(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) m.points.push_back(g.position(k));
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto [i, j] = g.site(k);
        if (parity_of(i, j) == p) continue;
        long w = g.index(i - 1, j), e = g.index(i + 1, j), n = g.index(i, j + 1), s = g.index(i, j - 1);
        if (w < 0 || e < 0 || n < 0 || s < 0) continue;
        m.tris.push_back({std::size_t(w), std::size_t(e), std::size_t(n)});
        m.tris.push_back({std::size_t(w), std::size_t(e), std::size_t(s)});
    }
    return m;
}

double AffineQField::area(std::size_t t) const {
    const auto& T = mesh.tris[t];
    const Point &a = mesh.points[T[0]], &b = mesh.points[T[1]], &c = mesh.points[T[2]];
    return 0.5 * std::fabs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

std::array<std::array<double, 2>, 3> AffineQField::gradient(std::size_t t) const {
    const auto& T = mesh.tris[t];
    const Point &p0 = mesh.points[T[0]], &p1 = mesh.points[T[1]], &p2 = mesh.points[T[2]];
    double d1x = p1[0] - p0[0], d1y = p1[1] - p0[1], d2x = p2[0] - p0[0], d2y = p2[1] - p0[1];
    double det = d1x * d2y - d1y * d2x;
    const Sym2 &v0 = values[T[0]], &v1 = values[T[1]], &v2 = values[T[2]];
    auto g = [&](double a0, double a1, double a2) {
        double D1 = a1 - a0, D2 = a2 - a0;
        return std::array<double, 2>{(D1 * d2y - D2 * d1y) / det, (D2 * d1x - D1 * d2x) / det};
    };
    return {g(v0.a, v1.a, v2.a), g(v0.b, v1.b, v2.b), g(v0.c, v1.c, v2.c)};
}

double AffineQField::gradient_norm2(std::size_t t) const {
    auto g = gradient(t);
    auto n2 = [](const std::array<double, 2>& v) { return v[0] * v[0] + v[1] * v[1]; };
    return n2(g[0]) + 2 * n2(g[1]) + n2(g[2]);
}

Sym2 AffineQField::value_at(std::size_t t, const Point& x) const {
    const auto& T = mesh.tris[t];
    auto g = gradient(t);
    const Point& p0 = mesh.points[T[0]];
    const Sym2& v0 = values[T[0]];
    double dx = x[0] - p0[0], dy = x[1] - p0[1];
    return {v0.a + g[0][0] * dx + g[0][1] * dy, v0.b + g[1][0] * dx + g[1][1] * dy, v0.c + g[2][0] * dx + g[2][1] * dy};
}

namespace {

AffineQField make_affine(const Grid2& g, Mesh mesh, std::vector<Sym2> values, bool sub) {
    AffineQField a{std::move(mesh), std::move(values), sub, g};
    return a;
}

std::vector<Sym2> site_values(const DirectorField2& f) {
    std::vector<Sym2> v;
    v.reserve(f.u.size());
    for (const auto& u : f.u) v.push_back(Sym2{u.x() * u.x(), u.x() * u.y(), u.y() * u.y()});
    return v;
}

}  // namespace

AffineQField affine_interpolate(const DirectorField2& f) {
    return make_affine(f.grid, triangulate(f.grid), site_values(f), false);
}

AffineQField affine_interpolate(const PCQField& f) {
    std::vector<Sym2> v;
    v.reserve(f.q.size());
    for (const auto& q : f.q) v.push_back(q.mat());
    return make_affine(f.grid, triangulate(f.grid), std::move(v), false);
}

AffineQField affine_interpolate_sublattice(const DirectorField2& f, Parity p) {
    return make_affine(f.grid, triangulate_sublattice(f.grid, p), site_values(f), true);
}

double dirichlet_energy(const AffineQField& f, const std::optional<Rect>& region) {
    Accumulator e;
    if (!region) {
        for (std::size_t t = 0; t < f.mesh.tris.size(); ++t) e.add(f.area(t) * f.gradient_norm2(t));
        return e.value();
    }
    Accumulator covered;
    for (std::size_t t = 0; t < f.mesh.tris.size(); ++t) {
        const auto& T = f.mesh.tris[t];
        Polygon p = clip(Polygon{f.mesh.points[T[0]], f.mesh.points[T[1]], f.mesh.points[T[2]]}, *region);
        if (p.size() < 3) continue;
        double a = polygon_area(p);
        covered.add(a);
        e.add(a * f.gradient_norm2(t));
    }
    if (std::fabs(covered.value() - region->area()) > 1e-9 * std::max(1.0, region->area()))
        throw CoverageError("region not covered by the triangulation");
    return e.value();
}

double pc_affine_l2_gap(const PCQField& pc, const AffineQField& aff) {
    if (aff.sublattice) throw IncompatibleFields("gap needs the full-lattice triangulation");
    if (!pc.grid.same_as(aff.grid)) throw IncompatibleFields("fields live on different grids");
    for (std::size_t k = 0; k < pc.q.size(); ++k) {
        const Sym2 &a = pc.q[k].mat(), &b = aff.values[k];
        if (a.a != b.a || a.b != b.b || a.c != b.c) throw IncompatibleFields("fields carry different vertex data");
    }
    const double h = 0.5 * pc.grid.eps();
    Accumulator gap;
    for (std::size_t t = 0; t < aff.mesh.tris.size(); ++t) {
        const auto& T = aff.mesh.tris[t];
        Polygon tri{aff.mesh.points[T[0]], aff.mesh.points[T[1]], aff.mesh.points[T[2]]};
        for (std::size_t v : T) {
            const Point& c = aff.mesh.points[v];
            Rect cell = intersect({c[0] - h, c[1] - h, c[0] + h, c[1] + h}, pc.grid.domain());
            Polygon part = clip(tri, cell);
            if (part.size() < 3) continue;
            const Sym2& qv = pc.q[v].mat();
            gap.add(integrate_quadratic(part, [&](const Point& x) { return frobenius2(qv - aff.value_at(t, x)); }));
        }
    }
    return gap.value();
}

std::optional<Sym2> SublatticeQField::value_at(const Point& x) const {
    double e = grid.eps();
    double fx = x[0] / e, fy = x[1] / e;
    int ci = int(std::floor(fx)), cj = int(std::floor(fy));
    std::optional<Sym2> best;
    long best_index = -1;
    for (int i = ci - 1; i <= ci + 2; ++i)
        for (int j = cj - 1; j <= cj + 2; ++j) {
            if (parity_of(i, j) != parity || !grid.contains(i, j)) continue;
            if (std::fabs(fx - i) + std::fabs(fy - j) > 1 + 1e-12) continue;
            long k = grid.index(i, j);
            if (best_index >= 0 && k > best_index) continue;
            auto it = std::lower_bound(sites.begin(), sites.end(), std::size_t(k));
            best = q[std::size_t(it - sites.begin())].mat();
            best_index = k;
        }
    return best;
}

std::pair<SublatticeQField, SublatticeQField> split_parity(const DirectorField2& f) {
    SublatticeQField odd{f.grid, Parity::Odd, {}, {}}, even{f.grid, Parity::Even, {}, {}};
    for (std::size_t k = 0; k < f.grid.size(); ++k) {
        auto [i, j] = f.grid.site(k);
        SublatticeQField& dst = parity_of(i, j) == Parity::Odd ? odd : even;
        dst.sites.push_back(k);
        dst.q.push_back(q_of(f.u[k]));
    }
    return {std::move(odd), std::move(even)};
}

Grid3::Grid3(int nx_, int ny_, int nz_, double eps_) : nx(nx_), ny(ny_), nz(nz_), eps(eps_) {
    if (nx < 1 || ny < 1 || nz < 1) throw DegenerateGrid("empty box");
    if (!(eps > 0)) throw DegenerateGrid("lattice spacing must be positive");
}

DirectorField3::DirectorField3(const Grid3& g, std::vector<Director3> values) : grid(g), u(std::move(values)) {
    if (u.size() != grid.size()) throw IncompatibleFields("one director per site required");
}

}  // namespace nemlat
