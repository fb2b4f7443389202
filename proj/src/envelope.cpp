#include "nemlat/envelope.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "nemlat/errors.hpp"
#include "nemlat/optimize.hpp"

namespace nemlat {

SampledFunction1D monotone_convex_envelope(const SampledFunction1D& h) {
    const auto& t = h.grid();
    const auto& v = h.values();
    const std::size_t n = t.size();
    std::vector<double> m(n);
    m[n - 1] = v[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) m[k] = std::min(v[k], m[k + 1]);

    std::vector<std::size_t> hull;
    for (std::size_t k = 0; k < n; ++k) {
        while (hull.size() >= 2) {
            std::size_t a = hull[hull.size() - 2], b = hull.back();
            double cr = (t[b] - t[a]) * (m[k] - m[a]) - (m[b] - m[a]) * (t[k] - t[a]);
            if (cr > 0) break;
            hull.pop_back();
        }
        hull.push_back(k);
    }
    std::vector<double> out(n);
    std::size_t seg = 0;
    for (std::size_t k = 0; k < n; ++k) {
        while (seg + 1 < hull.size() && hull[seg + 1] < k) ++seg;
        std::size_t a = hull[seg];
        if (a == k) {
            out[k] = m[k];
            continue;
        }
        std::size_t b = hull[seg + 1];
        if (b == k) {
            out[k] = m[k];
            continue;
        }
        double w = (t[k] - t[a]) / (t[b] - t[a]);
        out[k] = (1 - w) * m[a] + w * m[b];
    }
    return SampledFunction1D(t, std::move(out));
}

double fhat_radial(const SampledFunction1D& h, const QTensor2& q) {
    return h(std::sqrt(2.0) * deviatoric_norm(q));
}

double fhat_radial(const Potential& f, const QTensor2& q) {
    return f.profile(std::sqrt(2.0) * deviatoric_norm(q));
}

double fhat_anisotropic_2d(const Potential& f, const QTensor2& q, int M) {
    if (deviatoric_norm(q) > 1e-8) {
        Decomposition2 d = decompose2(q);
        return f(d.u, d.v);
    }
    if (M < 1) throw InvalidSpec("angular resolution must be positive");
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < M; ++k) {
        double th = std::numbers::pi * k / M;
        best = std::min(best, f(Director2::from_angle(th), Director2::from_angle(th + std::numbers::pi / 2)));
    }
    return best;
}

void validate_surface(const SampledSurface& s) {
    if (s.nodes.size() != s.values.size()) throw InvalidSampling("surface nodes and values differ in length");
    for (const auto& p : s.nodes)
        if (std::hypot(p[0], p[1]) > 0.5 + 1e-12) throw InvalidSampling("surface node outside the disk");
    for (double v : s.values)
        if (!std::isfinite(v)) throw InvalidSampling("non-finite surface value");
}

std::vector<std::array<double, 2>> disk_nodes(int angles, int radii) {
    if (angles < 3 || radii < 1) throw InvalidSampling("disk grid too coarse");
    std::vector<std::array<double, 2>> nodes{{0.0, 0.0}};
    for (int r = 1; r <= radii; ++r) {
        double rad = 0.5 * r / radii;
        for (int a = 0; a < angles; ++a) {
            double th = 2 * std::numbers::pi * a / angles;
            nodes.push_back({rad * std::cos(th), rad * std::sin(th)});
        }
    }
    return nodes;
}

SampledSurface sample_fhat(const Potential& f, const std::vector<std::array<double, 2>>& nodes, int M) {
    SampledSurface s;
    s.nodes = nodes;
    for (const auto& p : nodes) {
        QTensor2 q = QTensor2::from_deviatoric(p[0], p[1]);
        s.values.push_back(f.isotropic ? fhat_radial(f, q) : fhat_anisotropic_2d(f, q, M));
    }
    return s;
}

namespace {

LowerEnvelope make_envelope(const SampledSurface& s) {
    validate_surface(s);
    std::vector<double> coords;
    coords.reserve(2 * s.nodes.size());
    for (const auto& p : s.nodes) {
        coords.push_back(p[0]);
        coords.push_back(p[1]);
    }
    return LowerEnvelope(2, std::move(coords), s.values);
}

}  // namespace

SampledSurface convex_envelope_disk(const SampledSurface& s) {
    LowerEnvelope env = make_envelope(s);
    SampledSurface out;
    out.nodes = s.nodes;
    out.values.reserve(s.nodes.size());
    for (std::size_t k = 0; k < s.nodes.size(); ++k)
        out.values.push_back(std::min(s.values[k], env.at({s.nodes[k][0], s.nodes[k][1]})));
    return out;
}

double envelope_at(const SampledSurface& s, double q1, double q2) { return make_envelope(s).at({q1, q2}); }

Hom2D::Hom2D(const Potential& f, const Hom2DOptions& opt) : f_(f), opt_(opt) {
    if (f.isotropic && !opt.force_surface) {
        SampledFunction1D h = SampledFunction1D::uniform(opt.grid_nodes, [&](double x) { return f.profile(x); });
        profile_ = std::make_unique<SampledFunction1D>(monotone_convex_envelope(h));
        return;
    }
    auto nodes = disk_nodes(opt.angles, opt.radii);
    for (const auto& p : f.marked_points) nodes.push_back(p);
    surface_ = std::make_unique<LowerEnvelope>(make_envelope(sample_fhat(f, nodes, opt.M)));
}

double Hom2D::relaxed(const QTensor2& q) const {
    if (profile_) return (*profile_)(std::sqrt(2.0) * deviatoric_norm(q));
    return surface_->at({q.q1(), q.q2()});
}

double Hom2D::operator()(const QTensor2& q) const { return 4.0 * relaxed(q); }

double f_hom_2d(const Potential& f, const QTensor2& q, const Hom2DOptions& opt) { return Hom2D(f, opt)(q); }

double pairwise_sum(const Potential& f, const std::array<Director3, 4>& quad) {
    double s = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) s += f(quad[i], quad[j]);
    return s;
}

namespace {

using Vec3 = std::array<double, 3>;

bool unit_quad(const std::vector<double>& x, std::array<Vec3, 4>& u) {
    for (int k = 0; k < 4; ++k) {
        double n = std::sqrt(x[3 * k] * x[3 * k] + x[3 * k + 1] * x[3 * k + 1] + x[3 * k + 2] * x[3 * k + 2]);
        if (!(n > 1e-8)) return false;
        for (int d = 0; d < 3; ++d) u[k][d] = x[3 * k + d] / n;
    }
    return true;
}

// xx, xy, xz, yy, yz components of the mean minus target, off-diagonals weighted for Frobenius
std::array<double, 6> constraint(const std::array<Vec3, 4>& u, const Sym3& q) {
    Sym3 s;
    for (const auto& v : u) {
        s.xx += 0.25 * v[0] * v[0];
        s.xy += 0.25 * v[0] * v[1];
        s.xz += 0.25 * v[0] * v[2];
        s.yy += 0.25 * v[1] * v[1];
        s.yz += 0.25 * v[1] * v[2];
        s.zz += 0.25 * v[2] * v[2];
    }
    Sym3 d = s - q;
    const double r2 = std::sqrt(2.0);
    return {d.xx, r2 * d.xy, r2 * d.xz, d.yy, r2 * d.yz, d.zz};
}

double residual_norm(const std::array<double, 6>& c) {
    double s = 0;
    for (double v : c) s += v * v;
    return std::sqrt(s);
}

double pair_energy(const Potential& f, const std::array<Vec3, 4>& u) {
    double s = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            double c = u[i][0] * u[j][0] + u[i][1] * u[j][1] + u[i][2] * u[j][2];
            s += f.h(std::min(std::fabs(c), 1.0));
        }
    return s;
}

// Gauss-Newton on the mean constraint, minimum-norm steps
std::vector<double> project(const std::vector<double>& x0, const Sym3& q) {
    std::vector<double> x = x0;
    std::array<Vec3, 4> u;
    for (int it = 0; it < 60; ++it) {
        if (!unit_quad(x, u)) return x;
        auto c = constraint(u, q);
        if (residual_norm(c) < 1e-14) break;
        Eigen::Matrix<double, 5, 12> J;
        const double h = 1e-7;
        for (int k = 0; k < 12; ++k) {
            std::vector<double> xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            std::array<Vec3, 4> up, um;
            unit_quad(xp, up);
            unit_quad(xm, um);
            auto cp = constraint(up, q), cm = constraint(um, q);
            for (int r = 0; r < 5; ++r) J(r, k) = (cp[r] - cm[r]) / (2 * h);
        }
        Eigen::Matrix<double, 5, 1> r;
        for (int k = 0; k < 5; ++k) r(k) = c[k];
        Eigen::Matrix<double, 5, 5> JJ = J * J.transpose();
        JJ.diagonal().array() += 1e-14;
        Eigen::Matrix<double, 12, 1> dx = -J.transpose() * JJ.ldlt().solve(r);
        for (int k = 0; k < 12; ++k) x[k] += dx(k);
    }
    return x;
}

Eigen::Matrix3d as_matrix(const Sym3& m) {
    Eigen::Matrix3d a;
    a << m.xx, m.xy, m.xz, m.xy, m.yy, m.yz, m.xz, m.yz, m.zz;
    return a;
}

}  // namespace

Fhat3DResult fhat_3d(const Potential& f, const QTensor3& q, const Fhat3DOptions& opt) {
    if (!f.isotropic) throw InvalidSpec("fhat_3d needs a potential defined on the sphere");
    if (opt.starts < 1) throw InvalidSpec("fhat_3d needs at least one start");
    const Sym3& Q = q.mat();

    std::vector<std::vector<double>> starts;
    Decomposition3 d = decompose3(q);
    std::vector<double> x0;
    for (const auto& v : {d.u, d.v, d.w, d.z})
        for (int k = 0; k < 3; ++k) x0.push_back(v[k]);
    starts.push_back(x0);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(as_matrix(Q));
    Eigen::Matrix3d root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                           es.eigenvectors().transpose();
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int s = 1; s < opt.starts; ++s) {
        Eigen::Matrix<double, 4, 3> g;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 3; ++j) g(i, j) = gauss(rng);
        Eigen::HouseholderQR<Eigen::Matrix<double, 4, 3>> qr(g);
        Eigen::Matrix<double, 4, 3> V = qr.householderQ() * Eigen::Matrix<double, 4, 3>::Identity();
        Eigen::Matrix<double, 3, 4> W = 2.0 * root * V.transpose();
        std::vector<double> x;
        for (int k = 0; k < 4; ++k) {
            Eigen::Vector3d col = W.col(k);
            if (col.norm() < 1e-6) col = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
            for (int j = 0; j < 3; ++j) x.push_back(col(j));
        }
        starts.push_back(x);
    }

    struct Candidate {
        double value, residual;
        std::size_t index;
        std::array<Vec3, 4> u;
    };
    std::vector<Candidate> found;
    double best_residual = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < starts.size(); ++s) {
        std::vector<double> x = starts[s];
        double w = 10.0;
        for (int stage = 0; stage < 5; ++stage, w *= 10.0) {
            Objective obj = [&f, &Q, w](const std::vector<double>& y) {
                std::array<Vec3, 4> u;
                if (!unit_quad(y, u)) return 1e30;
                double r = residual_norm(constraint(u, Q));
                return pair_energy(f, u) + w * r * r;
            };
            x = bfgs(obj, x, 300).x;
        }
        x = project(x, Q);
        std::array<Vec3, 4> u;
        if (!unit_quad(x, u)) continue;
        double res = residual_norm(constraint(u, Q));
        best_residual = std::min(best_residual, res);
        if (res <= opt.feasibility) found.push_back({pair_energy(f, u), res, s, u});
    }
    if (found.empty()) throw OptimizationFailure("no feasible quadruple found", best_residual);
    auto best = std::min_element(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
        return a.value < b.value || (a.value == b.value && a.index < b.index);
    });
    auto dir = [](const Vec3& v) { return Director3(v[0], v[1], v[2]).canonical(); };
    std::array<Director3, 4> cert{dir(best->u[0]), dir(best->u[1]), dir(best->u[2]), dir(best->u[3])};
    return {best->value, cert, best->residual};
}

Hom3DResult f_hom_3d(const Potential& f, const QTensor3& q, const Hom3DOptions& opt) {
    if (opt.slice_steps < 1) throw InvalidSpec("slice needs at least one step");
    Eigen3 e = eigen_sym(q.mat());
    const auto& R = e.vectors;
    auto in_frame = [&](double a, double b, double c) {
        std::array<double, 3> l{a, b, c};
        Sym3 m;
        for (int k = 0; k < 3; ++k) {
            const auto& v = R[k];
            m.xx += l[k] * v[0] * v[0];
            m.xy += l[k] * v[0] * v[1];
            m.xz += l[k] * v[0] * v[2];
            m.yy += l[k] * v[1] * v[1];
            m.yz += l[k] * v[1] * v[2];
            m.zz += l[k] * v[2] * v[2];
        }
        double fix = (1.0 - m.trace()) / 3.0;
        m.xx += fix;
        m.yy += fix;
        m.zz += fix;
        return QTensor3(m);
    };

    // isotropic potentials: fhat depends only on the sorted spectrum
    std::map<std::array<long long, 3>, double> cache;
    auto fhat_at = [&](double a, double b, double c) {
        std::array<double, 3> l{a, b, c};
        std::sort(l.begin(), l.end());
        std::array<long long, 3> key{std::llround(l[0] * 1e12), std::llround(l[1] * 1e12), std::llround(l[2] * 1e12)};
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        double v = fhat_3d(f, in_frame(a, b, c), opt.fhat).value;
        cache[key] = v;
        return v;
    };

    std::vector<double> coords, values;
    const int k = opt.slice_steps;
    for (int i = 0; i <= k; ++i)
        for (int j = 0; i + j <= k; ++j) {
            double a = double(i) / k, b = double(j) / k, c = 1.0 - a - b;
            if (c < 0) c = 0;
            coords.push_back(a);
            coords.push_back(b);
            values.push_back(fhat_at(a, b, c));
        }
    double l0 = std::max(e.values[0], 0.0), l1 = std::max(e.values[1], 0.0);
    double own = fhat_at(l0, l1, 1.0 - l0 - l1);
    coords.push_back(l0);
    coords.push_back(l1);
    values.push_back(own);
    LowerEnvelope env(2, coords, values);
    double v = std::min(own, env.at({l0, l1}));
    return {1.5 * v, own, values.size()};
}

}  // namespace nemlat
