#include "nemlat/qtensor.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <numbers>
#include <string>

#include "nemlat/errors.hpp"

namespace nemlat {

namespace {

constexpr double kZeroComponent = 1e-14;

std::array<double, 3> cross(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

std::array<double, 3> normalized(std::array<double, 3> a) {
    double n = std::sqrt(dot3(a, a));
    return {a[0] / n, a[1] / n, a[2] / n};
}

std::array<double, 3> mul(const Sym3& m, const std::array<double, 3>& v) {
    return {m.xx * v[0] + m.xy * v[1] + m.xz * v[2], m.xy * v[0] + m.yy * v[1] + m.yz * v[2],
            m.xz * v[0] + m.yz * v[1] + m.zz * v[2]};
}

std::string fmt_num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

}  // namespace

Director2::Director2(double x, double y) {
    double n = std::sqrt(x * x + y * y);
    if (!(std::fabs(n - 1.0) <= 1e-9))
        throw InvalidDirector("director norm " + fmt_num(n) + " is not 1");
    if (std::fabs(n - 1.0) > 0.5 * kConstructTol) {
        x /= n;
        y /= n;
    }
    x_ = x;
    y_ = y;
}

Director2 Director2::from_angle(double theta) { return Director2(std::cos(theta), std::sin(theta)); }

Director2 Director2::rotated(double phi) const {
    double c = std::cos(phi), s = std::sin(phi);
    return Director2(c * x_ - s * y_, s * x_ + c * y_);
}

Director2 Director2::canonical() const {
    if (x_ < -kZeroComponent || (std::fabs(x_) <= kZeroComponent && y_ < 0)) return -*this;
    return *this;
}

Director3::Director3(double x, double y, double z) {
    double n = std::sqrt(x * x + y * y + z * z);
    if (!(std::fabs(n - 1.0) <= 1e-9))
        throw InvalidDirector("director norm " + fmt_num(n) + " is not 1");
    if (std::fabs(n - 1.0) > 0.5 * kConstructTol) {
        x /= n;
        y /= n;
        z /= n;
    }
    v_ = {x, y, z};
}

Director3 Director3::canonical() const {
    for (int k = 0; k < 3; ++k) {
        if (std::fabs(v_[k]) > kZeroComponent) return v_[k] < 0 ? -*this : *this;
    }
    return *this;
}

double Sym3::at(int i, int j) const {
    if (i > j) std::swap(i, j);
    if (i == 0) return j == 0 ? xx : (j == 1 ? xy : xz);
    if (i == 1) return j == 1 ? yy : yz;
    return zz;
}

double frobenius2(const Sym2& m) { return m.a * m.a + 2 * m.b * m.b + m.c * m.c; }

double frobenius2(const Sym3& m) {
    return m.xx * m.xx + m.yy * m.yy + m.zz * m.zz + 2 * (m.xy * m.xy + m.xz * m.xz + m.yz * m.yz);
}

Sym2 operator-(const Sym2& p, const Sym2& q) { return {p.a - q.a, p.b - q.b, p.c - q.c}; }

Sym3 operator-(const Sym3& p, const Sym3& q) {
    return {p.xx - q.xx, p.xy - q.xy, p.xz - q.xz, p.yy - q.yy, p.yz - q.yz, p.zz - q.zz};
}

Eigen2 eigen_sym(const Sym2& m) {
    double mean = 0.5 * (m.a + m.c);
    double d = std::hypot(0.5 * (m.a - m.c), m.b);
    double phi = 0.5 * std::atan2(2 * m.b, m.a - m.c);
    double c = std::cos(phi), s = std::sin(phi);
    Eigen2 e;
    e.values = {mean - d, mean + d};
    e.vectors = {{{-s, c}, {c, s}}};
    return e;
}

Eigen3 eigen_sym(const Sym3& m) {
    Eigen3 e;
    double q = m.trace() / 3.0;
    double p1 = m.xy * m.xy + m.xz * m.xz + m.yz * m.yz;
    double p2 = (m.xx - q) * (m.xx - q) + (m.yy - q) * (m.yy - q) + (m.zz - q) * (m.zz - q) + 2 * p1;
    double scale = std::max({std::fabs(m.xx), std::fabs(m.yy), std::fabs(m.zz), 1e-300});
    if (p2 <= 1e-30 * scale * scale) {
        e.values = {q, q, q};
        e.vectors = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
        return e;
    }
    double p = std::sqrt(p2 / 6.0);
    Sym3 b{(m.xx - q) / p, m.xy / p, m.xz / p, (m.yy - q) / p, m.yz / p, (m.zz - q) / p};
    double det = b.xx * (b.yy * b.zz - b.yz * b.yz) - b.xy * (b.xy * b.zz - b.yz * b.xz) +
                 b.xz * (b.xy * b.yz - b.yy * b.xz);
    double r = std::clamp(det / 2.0, -1.0, 1.0);
    double phi = std::acos(r) / 3.0;
    // the extreme eigenvalue farthest from the other two is insensitive to rounding in phi
    bool top = r >= 0;
    double lam = top ? q + 2 * p * std::cos(phi) : q + 2 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);

    std::array<double, 3> r0{m.xx - lam, m.xy, m.xz}, r1{m.xy, m.yy - lam, m.yz}, r2{m.xz, m.yz, m.zz - lam};
    std::array<std::array<double, 3>, 3> cands{cross(r0, r1), cross(r0, r2), cross(r1, r2)};
    int best = 0;
    for (int k = 1; k < 3; ++k)
        if (dot3(cands[k], cands[k]) > dot3(cands[best], cands[best])) best = k;
    std::array<double, 3> ev = normalized(cands[best]);

    // orthonormal complement
    int axis = 0;
    for (int k = 1; k < 3; ++k)
        if (std::fabs(ev[k]) < std::fabs(ev[axis])) axis = k;
    std::array<double, 3> ax{0, 0, 0};
    ax[axis] = 1;
    std::array<double, 3> s = normalized(cross(ev, ax));
    std::array<double, 3> t = cross(ev, s);
    std::array<double, 3> ms = mul(m, s), mt = mul(m, t);
    Eigen2 sub = eigen_sym(Sym2{dot3(s, ms), dot3(s, mt), dot3(t, mt)});
    double lam_sep = dot3(ev, mul(m, ev));

    auto lift = [&](const std::array<double, 2>& w) {
        return normalized({w[0] * s[0] + w[1] * t[0], w[0] * s[1] + w[1] * t[1], w[0] * s[2] + w[1] * t[2]});
    };
    std::array<std::pair<double, std::array<double, 3>>, 3> all{
        std::make_pair(lam_sep, ev), std::make_pair(sub.values[0], lift(sub.vectors[0])),
        std::make_pair(sub.values[1], lift(sub.vectors[1]))};
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (int k = 0; k < 3; ++k) {
        e.values[k] = all[k].first;
        e.vectors[k] = all[k].second;
    }
    return e;
}

Membership in_K(const Sym2& m) {
    Eigen2 e = eigen_sym(m);
    double defect = std::fabs(m.a + m.c - 1.0);
    return {defect <= kMemberTol && e.values[0] >= -kMemberTol, defect, e.values[0]};
}

Membership in_K(const Sym3& m) {
    Eigen3 e = eigen_sym(m);
    double defect = std::fabs(m.trace() - 1.0);
    return {defect <= kMemberTol && e.values[0] >= -kMemberTol, defect, e.values[0]};
}

QTensor2::QTensor2(double q11, double q12, double q22) : m_{q11, q12, q22} {
    if (!std::isfinite(q11) || !std::isfinite(q12) || !std::isfinite(q22))
        throw InvalidQTensor("non-finite entry");
    double tr = q11 + q22;
    if (std::fabs(tr - 1.0) > kConstructTol) throw InvalidQTensor("trace " + fmt_num(tr) + " is not 1");
    double mn = eigen_sym(m_).values[0];
    if (mn < -kConstructTol) throw InvalidQTensor("negative eigenvalue " + fmt_num(mn));
}

QTensor2 QTensor2::from_deviatoric(double q1, double q2) { return QTensor2(0.5 + q1, q2, 0.5 - q1); }

QTensor3::QTensor3(const Sym3& m) : m_(m) {
    double tr = m.trace();
    if (std::fabs(tr - 1.0) > kConstructTol) throw InvalidQTensor("trace " + fmt_num(tr) + " is not 1");
    double mn = eigen_sym(m).values[0];
    if (mn < -kConstructTol) throw InvalidQTensor("negative eigenvalue " + fmt_num(mn));
}

QTensor3 QTensor3::third_identity() {
    double t = 1.0 / 3.0;
    return QTensor3(Sym3{t, 0, 0, t, 0, 1.0 - 2 * t});
}

QTensor2 q_of(const Director2& u) { return QTensor2(u.x() * u.x(), u.x() * u.y(), u.y() * u.y()); }

QTensor3 q_of(const Director3& u) {
    return QTensor3(Sym3{u.x() * u.x(), u.x() * u.y(), u.x() * u.z(), u.y() * u.y(), u.y() * u.z(), u.z() * u.z()});
}

double deviatoric_norm(const QTensor2& q) {
    double d = q.q11() - 0.5, e = q.q22() - 0.5;
    return std::sqrt(d * d + 2 * q.q12() * q.q12() + e * e);
}

QTensor2 midpoint(const Director2& u, const Director2& v) {
    return QTensor2(0.5 * (u.x() * u.x() + v.x() * v.x()), 0.5 * (u.x() * u.y() + v.x() * v.y()),
                    0.5 * (u.y() * u.y() + v.y() * v.y()));
}

QTensor3 midpoint(const Director3& u, const Director3& v) {
    Sym3 m{0.5 * (u.x() * u.x() + v.x() * v.x()), 0.5 * (u.x() * u.y() + v.x() * v.y()),
           0.5 * (u.x() * u.z() + v.x() * v.z()), 0.5 * (u.y() * u.y() + v.y() * v.y()),
           0.5 * (u.y() * u.z() + v.y() * v.z()), 0.5 * (u.z() * u.z() + v.z() * v.z())};
    return QTensor3(m);
}

Decomposition2 decompose2(const Sym2& m) {
    Membership mem = in_K(m);
    if (!mem.inside)
        throw InvalidQTensor("outside K: trace defect " + fmt_num(mem.trace_defect) + ", min eigenvalue " +
                             fmt_num(mem.min_eigenvalue));
    double d = std::hypot(0.5 * (m.a - m.c), m.b);
    double lam = std::clamp(0.5 + d, 0.5, 1.0);
    double phi = 0.5 * std::atan2(2 * m.b, m.a - m.c);
    double c = std::cos(phi), s = std::sin(phi);
    double a1 = std::sqrt(lam), a2 = std::sqrt(1.0 - lam);
    Director2 u(a1 * c - a2 * s, a1 * s + a2 * c);
    Director2 v(a1 * c + a2 * s, a1 * s - a2 * c);
    return {u.canonical(), v.canonical()};
}

Decomposition2 decompose2(const QTensor2& q) { return decompose2(q.mat()); }

Decomposition3 decompose3(const Sym3& m) {
    Membership mem = in_K(m);
    if (!mem.inside)
        throw InvalidQTensor("outside K: trace defect " + fmt_num(mem.trace_defect) + ", min eigenvalue " +
                             fmt_num(mem.min_eigenvalue));
    Eigen3 e = eigen_sym(m);
    double l1 = std::max(e.values[0], 0.0), l2 = std::max(e.values[1], 0.0), l3 = std::max(e.values[2], 0.0);
    double delta = l2 + l3 - 0.5;
    double a = std::sqrt(std::max(2 * l2, 0.0));
    double b = std::sqrt(std::max(2 * (l3 - delta), 0.0));
    double c = std::sqrt(std::max(2 * l1, 0.0));
    double d = std::sqrt(std::max(2 * delta, 0.0));
    const auto& e1 = e.vectors[0];
    const auto& e2 = e.vectors[1];
    const auto& e3 = e.vectors[2];
    auto combo = [](double p, const std::array<double, 3>& x, double q, const std::array<double, 3>& y) {
        return Director3(p * x[0] + q * y[0], p * x[1] + q * y[1], p * x[2] + q * y[2]).canonical();
    };
    return {combo(a, e2, b, e3), combo(a, e2, -b, e3), combo(c, e1, d, e3), combo(c, e1, -d, e3)};
}

Decomposition3 decompose3(const QTensor3& q) { return decompose3(q.mat()); }

Sym2 reconstruct(const Decomposition2& d) {
    const auto& u = d.u;
    const auto& v = d.v;
    return {0.5 * (u.x() * u.x() + v.x() * v.x()), 0.5 * (u.x() * u.y() + v.x() * v.y()),
            0.5 * (u.y() * u.y() + v.y() * v.y())};
}

Sym3 quad_mean(const std::array<Director3, 4>& quad) {
    Sym3 s;
    for (const auto& u : quad) {
        s.xx += 0.25 * u.x() * u.x();
        s.xy += 0.25 * u.x() * u.y();
        s.xz += 0.25 * u.x() * u.z();
        s.yy += 0.25 * u.y() * u.y();
        s.yz += 0.25 * u.y() * u.z();
        s.zz += 0.25 * u.z() * u.z();
    }
    return s;
}

Sym3 reconstruct(const Decomposition3& d) { return quad_mean({d.u, d.v, d.w, d.z}); }

}  // namespace nemlat
