#include "nemlat/vortex.hpp"

#include <cmath>
#include <numbers>

#include "nemlat/energy.hpp"
#include "nemlat/errors.hpp"
#include "nemlat/summation.hpp"

namespace nemlat {

std::array<Vec2, 2> AuxField::gradient(std::size_t t) const {
    const auto& T = mesh.tris[t];
    const Point &p0 = mesh.points[T[0]], &p1 = mesh.points[T[1]], &p2 = mesh.points[T[2]];
    double d1x = p1[0] - p0[0], d1y = p1[1] - p0[1], d2x = p2[0] - p0[0], d2y = p2[1] - p0[1];
    double det = d1x * d2y - d1y * d2x;
    std::array<Vec2, 2> g;
    for (int c = 0; c < 2; ++c) {
        double D1 = a[T[1]][c] - a[T[0]][c], D2 = a[T[2]][c] - a[T[0]][c];
        g[c] = {(D1 * d2y - D2 * d1y) / det, (D2 * d1x - D1 * d2x) / det};
    }
    return g;
}

double AuxField::gradient_norm2(std::size_t t) const {
    auto g = gradient(t);
    return g[0][0] * g[0][0] + g[0][1] * g[0][1] + g[1][0] * g[1][0] + g[1][1] * g[1][1];
}

Vec2 AuxField::value_at(std::size_t t, const Point& x) const {
    auto g = gradient(t);
    std::size_t v = mesh.tris[t][0];
    double dx = x[0] - mesh.points[v][0], dy = x[1] - mesh.points[v][1];
    return {a[v][0] + g[0][0] * dx + g[0][1] * dy, a[v][1] + g[1][0] * dx + g[1][1] * dy};
}

long AuxField::locate(const Point& x) const {
    double e = grid.eps();
    double fx = x[0] / e, fy = x[1] / e;
    int i = int(std::floor(fx)), j = int(std::floor(fy));
    // points on the far edges belong to the last square
    if (i == grid.i_max() && fx - i < 1e-12) --i;
    if (j == grid.j_max() && fy - j < 1e-12) --j;
    if (i < grid.i_min() || j < grid.j_min() || i >= grid.i_max() || j >= grid.j_max()) return -1;
    long square = long(j - grid.j_min()) * (grid.nx() - 1) + (i - grid.i_min());
    bool upper = (fx - i) + (fy - j) > 1;
    return 2 * square + (upper ? 1 : 0);
}

Vec2 aux_value(const QTensor2& q) { return {2 * q.q11() - 1, 2 * q.q12()}; }

AuxField aux_map(const PCQField& f) {
    AuxField out{triangulate(f.grid), {}, f.grid};
    out.a.reserve(f.q.size());
    for (const auto& q : f.q) out.a.push_back(aux_value(q));
    return out;
}

AuxField aux_map(const DirectorField2& f) { return aux_map(pc_field(f)); }

double JacobianField::total() const {
    Accumulator acc;
    for (std::size_t t = 0; t < det.size(); ++t) acc.add(det[t] * area[t]);
    return acc.value();
}

JacobianField jacobian_density(const AuxField& a) {
    JacobianField j;
    std::size_t n = a.mesh.tris.size();
    j.det.reserve(n);
    j.area.reserve(n);
    j.centroid.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        auto g = a.gradient(t);
        j.det.push_back(g[0][0] * g[1][1] - g[0][1] * g[1][0]);
        const auto& T = a.mesh.tris[t];
        const Point &p0 = a.mesh.points[T[0]], &p1 = a.mesh.points[T[1]], &p2 = a.mesh.points[T[2]];
        j.area.push_back(0.5 * std::fabs((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1])));
        j.centroid.push_back({(p0[0] + p1[0] + p2[0]) / 3, (p0[1] + p1[1] + p2[1]) / 3});
    }
    return j;
}

double ball_mass(const JacobianField& j, const Point& center, double r) {
    Accumulator acc;
    for (std::size_t t = 0; t < j.det.size(); ++t) {
        double dx = j.centroid[t][0] - center[0], dy = j.centroid[t][1] - center[1];
        if (dx * dx + dy * dy <= r * r) acc.add(j.det[t] * j.area[t]);
    }
    return acc.value();
}

Winding winding_number(const AuxField& a, const Point& center, double r) {
    double eps = a.grid.eps();
    if (!(r >= 4 * eps)) throw DegenerateLoop("loop radius below the core exclusion radius");
    int n = std::max(256, int(std::ceil(16 * std::numbers::pi * r / eps)));
    double total = 0, prev = 0;
    Vec2 first{};
    for (int k = 0; k <= n; ++k) {
        double th = 2 * std::numbers::pi * k / n;
        Point x{center[0] + r * std::cos(th), center[1] + r * std::sin(th)};
        long t = a.locate(x);
        if (t < 0) throw DegenerateLoop("loop leaves the triangulated domain");
        for (std::size_t v : a.mesh.tris[std::size_t(t)])
            if (std::hypot(a.a[v][0], a.a[v][1]) < 0.5) throw DegenerateLoop("loop crosses a low-|A| vertex");
        Vec2 val = k == n ? first : a.value_at(std::size_t(t), x);
        if (std::hypot(val[0], val[1]) < 0.5) throw DegenerateLoop("loop passes through a defect core");
        if (k == 0) first = val;
        double ang = std::atan2(val[1], val[0]);
        if (k > 0) {
            double d = ang - prev;
            d -= 2 * std::numbers::pi * std::round(d / (2 * std::numbers::pi));
            total += d;
        }
        prev = ang;
    }
    double raw = total / (2 * std::numbers::pi);
    int deg = int(std::lround(raw));
    return {deg, raw, std::fabs(raw - deg)};
}

Point default_center(const Grid2& g) { return {0.5 * g.eps(), 0.5 * g.eps()}; }

DirectorField2 vortex_field(const Grid2& g, const std::vector<Defect>& defects) {
    for (const auto& d : defects) {
        if (d.charge == 0) throw InvalidSpec("defect charge must be nonzero");
        for (std::size_t k = 0; k < g.size(); ++k) {
            Point p = g.position(k);
            if (std::hypot(p[0] - d.center[0], p[1] - d.center[1]) < 1e-12 * std::max(1.0, g.eps()))
                throw SingularSite("defect centre coincides with a lattice site");
        }
    }
    return field_from_angle(g, [&](const Point& x) {
        double th = 0;
        for (const auto& d : defects) th += 0.5 * d.charge * std::atan2(x[1] - d.center[1], x[0] - d.center[0]);
        return th;
    });
}

DirectorField2 half_vortex_field(const Grid2& g, const Point& center, int sign) {
    if (sign != 1 && sign != -1) throw InvalidSpec("sign must be +1 or -1");
    return vortex_field(g, {{center, sign}});
}

ConcentrationFit concentration_fit(const std::vector<double>& eps_list,
                                   const std::function<DirectorField2(double)>& build) {
    if (eps_list.size() < 3) throw InsufficientData("fit needs at least three resolutions");
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        if (!(eps_list[k] > 0 && eps_list[k] < 1)) throw InvalidScaling("eps must lie in (0,1)");
        if (k > 0 && !(eps_list[k] < eps_list[k - 1])) throw InsufficientData("eps values must decrease");
    }
    ConcentrationFit fit{0, 0, 0, eps_list, {}};
    for (double e : eps_list) fit.energy.push_back(nn_defect_sum(build(e)));
    std::size_t n = eps_list.size();
    double mx = 0, my = 0;
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) {
        x[k] = std::fabs(std::log(eps_list[k]));
        mx += x[k] / double(n);
        my += fit.energy[k] / double(n);
    }
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (fit.energy[k] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double r = fit.energy[k] - fit.intercept - fit.slope * x[k];
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / double(n));
    return fit;
}

}  // namespace nemlat
