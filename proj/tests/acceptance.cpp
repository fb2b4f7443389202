// One line per acceptance criterion. Exit status is zero when the set of failing
// criteria equals the set passed with --expect-fail (empty by default).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "nemlat/energy.hpp"
#include "nemlat/envelope.hpp"
#include "nemlat/homogenize.hpp"
#include "nemlat/vortex.hpp"
#include "support/lp_oracle.hpp"
#include "support/quadrature.hpp"

using namespace nemlat;

namespace {

const double kPi = std::numbers::pi;

// pinned tolerances
constexpr double kTolIdentity = 1e-12;
constexpr double kTolReconstruct = 1e-10;
constexpr double kTolOracle = 1e-8;
constexpr double kTolCellAbs = 0.05;
constexpr double kTolCellRel = 0.05;
constexpr int kCellWindow = 8, kCellWindowLL = 32, kCellM = 64;
constexpr double kCellRho = 0.05;
constexpr double kTolZeroSet = 1e-9, kOutsideMargin = 0.05, kOutsideMin = 0.1;
constexpr double kTol3D = 0.03, kTolUniform = 0.01;
constexpr double kTolGradient = 0.02;
constexpr double kHedgehogCap = 26.0;
constexpr double kTolOscillation = 0.05;
constexpr double kTolWinding = 0.1, kTolMass = 0.05, kTolSlope = 0.1;
constexpr double kTolRotation = 1e-9;
constexpr double kTolDual = 1e-12;

std::set<int> failed;

void report(int n, bool pass, const std::string& detail) {
    std::printf("criterion %d %s: %s\n", n, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) failed.insert(n);
}

std::string fmt(const char* f, double a) {
    char b[128];
    std::snprintf(b, sizeof b, f, a);
    return b;
}

std::string fmt(const char* f, double a, double b_) {
    char b[256];
    std::snprintf(b, sizeof b, f, a, b_);
    return b;
}

Director2 rand_dir(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> a(0, 2 * kPi);
    return Director2::from_angle(a(rng));
}

Director3 rand_dir3(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    for (;;) {
        double x = n(rng), y = n(rng), z = n(rng), r = std::sqrt(x * x + y * y + z * z);
        if (r > 1e-6) return Director3(x / r, y / r, z / r);
    }
}

void criterion1() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> uni(0, 1);
    double id = 0, r2 = 0, r3 = 0;
    for (int k = 0; k < 10000; ++k) {
        Director2 u = rand_dir(rng), v = rand_dir(rng);
        QTensor2 m = midpoint(u, v);
        double ux = u.x(), uy = u.y(), vx = v.x(), vy = v.y();
        double a = 0.5 * (ux * ux + vx * vx) - 0.5, b = 0.5 * (ux * uy + vx * vy), c = 0.5 * (uy * uy + vy * vy) - 0.5;
        double lib = std::sqrt((m.q11() - 0.5) * (m.q11() - 0.5) + 2 * m.q12() * m.q12() +
                               (m.q22() - 0.5) * (m.q22() - 0.5));
        double dot = std::fabs(ux * vx + uy * vy);
        id = std::max({id, std::fabs(lib - std::numbers::sqrt2 / 2 * dot),
                       std::fabs(std::sqrt(a * a + 2 * b * b + c * c) - std::numbers::sqrt2 / 2 * dot)});

        double r = 0.5 * std::sqrt(uni(rng)), th = 2 * kPi * uni(rng);
        QTensor2 q = QTensor2::from_deviatoric(r * std::cos(th), r * std::sin(th));
        Decomposition2 d = decompose2(q);
        double e11 = 0.5 * (d.u.x() * d.u.x() + d.v.x() * d.v.x()) - q.q11();
        double e12 = 0.5 * (d.u.x() * d.u.y() + d.v.x() * d.v.y()) - q.q12();
        double e22 = 0.5 * (d.u.y() * d.u.y() + d.v.y() * d.v.y()) - q.q22();
        r2 = std::max({r2, std::fabs(e11), std::fabs(e12), std::fabs(e22)});

        int parts = 1 + int(uni(rng) * 4);
        double w[4], tot = 0, M[3][3] = {};
        for (int i = 0; i < parts; ++i) tot += (w[i] = uni(rng));
        for (int i = 0; i < parts; ++i) {
            Director3 e = rand_dir3(rng);
            for (int p = 0; p < 3; ++p)
                for (int s = 0; s < 3; ++s) M[p][s] += w[i] / tot * e[p] * e[s];
        }
        double fix = (1 - M[0][0] - M[1][1] - M[2][2]) / 3;
        for (int p = 0; p < 3; ++p) M[p][p] += fix;
        Decomposition3 d3 = decompose3(QTensor3(Sym3{M[0][0], M[0][1], M[0][2], M[1][1], M[1][2], M[2][2]}));
        for (int p = 0; p < 3; ++p)
            for (int s = 0; s < 3; ++s) {
                double v = 0;
                for (const auto& e : {d3.u, d3.v, d3.w, d3.z}) v += 0.25 * e[p] * e[s];
                r3 = std::max(r3, std::fabs(v - M[p][s]));
            }
    }
    report(1, id <= kTolIdentity && r2 <= kTolReconstruct && r3 <= kTolReconstruct,
           fmt("midpoint identity %.2e", id) + fmt(", decompose2 %.2e, decompose3 %.2e", r2, r3) +
               " (tolerances 1e-12, 1e-10, 10^4 samples)");
}

void criterion2() {
    std::vector<std::pair<std::string, std::function<double(double)>>> fns{
        {"-x^2", [](double x) { return -x * x; }},
        {"-x", [](double x) { return -x; }},
        {"-x^3", [](double x) { return -x * x * x; }},
        {"(x^2-1/4)^2", [](double x) { return (x * x - 0.25) * (x * x - 0.25); }},
        {"(1-x)^2", [](double x) { return (1 - x) * (1 - x); }}};
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> uni(-1, 1);
    for (int r = 0; r < 3; ++r) {
        int knots = 4 + 3 * r;
        std::vector<double> kx, ky;
        for (int k = 0; k <= knots; ++k) {
            kx.push_back(double(k) / knots);
            ky.push_back(uni(rng));
        }
        fns.push_back({"random-" + std::to_string(r + 1), [kx, ky](double x) {
                           std::size_t k = std::min<std::size_t>(kx.size() - 2, std::size_t(x * double(kx.size() - 1)));
                           double s = (x - kx[k]) / (kx[k + 1] - kx[k]);
                           return (1 - s) * ky[k] + s * ky[k + 1];
                       }});
    }
    double worst = 0;
    std::string which;
    for (const auto& [name, fn] : fns) {
        std::vector<double> t(201), h(201);
        for (int k = 0; k <= 200; ++k) h[k] = fn(t[k] = k / 200.0);
        auto lib = monotone_convex_envelope(SampledFunction1D(t, h)).values();
        auto ref = oracle::monotone_convex_minorant(t, h);
        for (int k = 0; k <= 200; ++k)
            if (std::fabs(lib[k] - ref[k]) > worst) {
                worst = std::fabs(lib[k] - ref[k]);
                which = name;
            }
    }
    report(2, worst <= kTolOracle,
           fmt("max |h++ - LP oracle| = %.2e over 8 profiles on 201 nodes (tolerance 1e-8)", worst) +
               (which.empty() ? "" : ", largest on " + which));
}

double oracle_hpp(const std::function<double(double)>& fn, double x) {
    std::vector<double> t(201), h(201);
    for (int k = 0; k <= 200; ++k) h[k] = fn(t[k] = k / 200.0);
    auto e = oracle::monotone_convex_minorant(t, h);
    int k = std::min(199, int(x * 200));
    double s = x * 200 - k;
    return (1 - s) * e[k] + s * e[k + 1];
}

void criterion3() {
    const double s = 0.5;
    Potential qw = quartic_well(s);
    CellProblemSpec2 spec;
    spec.window = kCellWindow;
    spec.M = kCellM;
    spec.rho = kCellRho;
    spec.anneal.seed = 303;
    std::vector<std::array<double, 2>> targets{{0, 0}, {0.125, 0}, {0.15, 0.2}};
    bool ok = true;
    std::string detail = "quartic well s=1/2, h=8, M=64:";
    for (const auto& q : targets) {
        spec.target = QTensor2::from_deviatoric(q[0], q[1]);
        double t = 2 * std::hypot(q[0], q[1]);
        double ref = 4 * oracle_hpp([s](double x) { return (x * x - s * s) * (x * x - s * s); }, t);
        double v = cell_problem_min(spec, qw).value_per_volume;
        ok = ok && std::fabs(v - ref) <= kTolCellAbs;
        detail += fmt(" %.4f vs %.4f;", v, ref);
    }
    spec.window = kCellWindowLL;
    spec.target = QTensor2::half_identity();
    double ll = cell_problem_min(spec, lebwohl_lasher()).value_per_volume;
    double ref_ll = 4 * oracle_hpp([](double x) { return -x * x; }, 0.0);
    bool ok_ll = std::fabs(ll - ref_ll) <= kTolCellRel * std::fabs(ref_ll);
    detail += fmt(" lebwohl-lasher h=32: %.4f vs %.4f", ll, ref_ll);
    report(3, ok && ok_ll, detail + " (tolerances 0.05 absolute, 5% relative)");
}

std::array<std::array<double, 2>, 4> noradial_matrices(double l, double m) {
    double tl = std::acos(l), tm = std::acos(m);
    auto q = [](double q11, double q12) { return std::array<double, 2>{q11 - 0.5, q12}; };
    double cp = std::cos(tl + tm), cm = std::cos(tl - tm), c = std::cos(tl);
    double sp = std::sin(2 * (tl + tm)), sm = std::sin(2 * (tl - tm)), s2 = std::sin(2 * tl);
    return {q(0.5 * (c * c + cp * cp), 0.25 * (s2 + sp)), q(0.5 * (c * c + cm * cm), 0.25 * (s2 + sm)),
            q(0.5 * (c * c + cm * cm), -0.25 * (s2 + sm)), q(0.5 * (c * c + cp * cp), -0.25 * (s2 + sp))};
}

void criterion4() {
    const double l = std::sqrt(0.5), m = std::sqrt(0.5);
    Potential nr = example_noradial(l, m);
    auto nodes = disk_nodes(32, 16);
    for (const auto& p : nr.marked_points) nodes.push_back(p);
    SampledSurface s = sample_fhat(nr, nodes, 360);
    auto G = noradial_matrices(l, m);
    double zero = 0;
    for (const auto& g : G) zero = std::max(zero, std::fabs(envelope_at(s, g[0], g[1])));
    std::mt19937_64 rng(404);
    std::exponential_distribution<double> ex(1.0);
    for (int k = 0; k < 100; ++k) {
        double w[4], tot = 0, a = 0, b = 0;
        for (double& x : w) tot += (x = ex(rng));
        for (int i = 0; i < 4; ++i) {
            a += w[i] / tot * G[i][0];
            b += w[i] / tot * G[i][1];
        }
        zero = std::max(zero, std::fabs(envelope_at(s, a, b)));
    }
    // co(G) is the square with these vertices for l = m = sqrt(1/2)
    double cx = 0, cy = 0, reach = 0;
    for (const auto& g : G) {
        cx += g[0] / 4;
        cy += g[1] / 4;
    }
    for (const auto& g : G) reach = std::max({reach, std::fabs(g[0] - cx), std::fabs(g[1] - cy)});
    double outside = INFINITY;
    for (auto [dx, dy] : std::vector<std::array<double, 2>>{{1, 0}, {-1, 0}, {0, 1}, {0, -1}})
        outside = std::min(outside, envelope_at(s, cx + dx * (reach + kOutsideMargin), cy + dy * (reach + kOutsideMargin)));
    report(4, zero < kTolZeroSet && outside > kOutsideMin,
           fmt("max envelope on G and 100 combinations %.2e, min 0.05 outside %.4f", zero, outside) +
               " (tolerances 1e-9, 0.1)");
}

void criterion5() {
    Potential ll = lebwohl_lasher();
    Fhat3DOptions opt;
    opt.seed = 505;
    Recovery3D r = recovery_3d(QTensor3::third_identity(), ll, 8, opt);
    double pair = 0, mean[3][3] = {};
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            double d = r.pattern[i].dot(r.pattern[j]);
            pair += -d * d;
        }
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) mean[p][q] += 0.25 * r.pattern[i][p] * r.pattern[i][q];
    }
    double cert = 0;
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) cert = std::max(cert, std::fabs(mean[p][q] - (p == q ? 1.0 / 3 : 0.0)));
    double err = std::fabs(r.density - 1.5 * pair) / std::fabs(1.5 * pair);
    Director3 e3(0, 0, 1);
    Recovery3D u = recovery_3d({e3, e3, e3, e3}, ll, 16);
    double err_u = std::fabs(u.density + 9) / 9;
    report(5, cert <= 1e-6 && err <= kTol3D && err_u <= kTolUniform,
           fmt("density %.6f vs 3/2 pairwise %.6f", r.density, 1.5 * pair) +
               fmt(", uniform %.6f (free-boundary %.6f)", u.density, u.boundary_density) +
               fmt(", certificate residual %.1e", cert) + " (tolerances 3%, 1%)");
}

void criterion6() {
    auto theta = [](double x, double y) { return std::sin(2 * kPi * x) * std::sin(2 * kPi * y); };
    auto q = [&](double x, double y) {
        double t = theta(x, y), c = std::cos(t), s = std::sin(t);
        return std::array<double, 3>{c * c, c * s, s * s};
    };
    double limit = oracle::dirichlet(q, 0, 1, 0, 1, 400);
    EnergySpec spec{lebwohl_lasher(), BondSet::NN2D, Scaling::FirstOrder, {}};
    std::vector<double> err;
    std::string detail = fmt("limit %.6f;", limit);
    for (int n : {32, 64, 128, 256}) {
        Grid2 g = build_grid(Rect{0, 0, 1, 1}, 1.0 / n);
        double e = first_order_energy(spec, field_from_angle(g, [&](const Point& p) { return theta(p[0], p[1]); }));
        err.push_back(std::fabs(e - limit) / limit);
        detail += fmt(" n=%.0f err %.2e;", n, err.back());
    }
    bool mono = true;
    for (std::size_t k = 1; k < err.size(); ++k) mono = mono && err[k] < err[k - 1];
    report(6, mono && err.back() <= kTolGradient, detail + " (tolerance 2% at n=256, decreasing)");
}

double hedgehog_direct(int n) {
    double total = 0;
    auto dir = [&](int i, int j) -> std::array<double, 2> {
        if (i == 0 && j == 0) return {1, 0};
        double r = std::hypot(double(i), double(j));
        return {i / r, j / r};
    };
    for (int j = -n; j <= n; ++j)
        for (int i = -n; i <= n; ++i)
            for (auto [di, dj] : std::vector<std::array<int, 2>>{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
                int a = i + di, b = j + dj;
                if (a < -n || a > n || b < -n || b > n) continue;
                auto u = dir(i, j), v = dir(a, b);
                double d = 1 - std::fabs(u[0] * v[0] + u[1] * v[1]);
                total += d * d;
            }
    return total;
}

void criterion7() {
    auto rows = hedgehog_counterexample({1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512});
    double worst = 0;
    for (const auto& r : rows) worst = std::max(worst, r.value);
    double direct = hedgehog_direct(32);
    bool agree = std::fabs(direct - rows[0].value) <= 1e-9 * direct;
    report(7, agree && worst <= kHedgehogCap,
           fmt("max F1 over eps=1/32..1/512 is %.4f (cap 26, bound %.4f)", worst, 8 + std::pow(std::sqrt(2.0) + 1, 4) / 2) +
               fmt(", direct recount at 1/32 %.6f", direct));
}

double oscillation_error(const Potential& f, double s, double* value, double* limit) {
    const double a = 1.0;
    double alpha = 0.5 * std::acos(s);
    auto q = [&](double x, double) {
        double pv = a * x + alpha, pw = a * x - alpha;
        double cv = std::cos(pv), sv = std::sin(pv), cw = std::cos(pw), sw = std::sin(pw);
        return std::array<double, 3>{0.5 * (cv * cv + cw * cw), 0.5 * (cv * sv + cw * sw), 0.5 * (sv * sv + sw * sw)};
    };
    *limit = 2 / (s * s) * oracle::dirichlet(q, 0, 1, 0, 1, 200);
    Grid2 g = build_grid(Rect{0, 0, 1, 1}, 1.0 / 256);
    auto field = oscillating_recovery(g, [a](const Point& x) { return a * x[0]; }, s);
    *value = first_order_energy({f, BondSet::Competition, Scaling::FirstOrder, {}}, field);
    return std::fabs(*value - *limit) / *limit;
}

void criterion8() {
    bool ok = true;
    std::string detail = "quartic well, twist 1, eps=1/256:";
    for (double s : {0.5, std::sqrt(0.5)}) {
        double v, lim;
        double e = oscillation_error(quartic_well(s), s, &v, &lim);
        ok = ok && e <= kTolOscillation;
        detail += fmt(" s=%.4f F1 %.4f", s, v) + fmt(" vs %.4f (rel %.3f);", lim, e);
    }
    report(8, ok, detail + " (tolerance 5%)");
    std::string sup = "octic well (x^2-s^2)^4:";
    for (double s : {0.5, std::sqrt(0.5)}) {
        double v, lim;
        double e = oscillation_error(octic_well(s), s, &v, &lim);
        sup += fmt(" s=%.4f rel %.2e;", s, e);
    }
    std::printf("criterion 8 supplement (not scored): %s\n", sup.c_str());
}

void criterion9() {
    Grid2 g = build_grid(Rect{-1, -1, 1, 1}, 1.0 / 256);
    Point c = default_center(g);
    auto aux = aux_map(half_vortex_field(g, c));
    bool wind = true;
    double worst_res = 0;
    for (double r : {0.1, 0.2, 0.3}) {
        Winding w = winding_number(aux, c, r);
        wind = wind && w.degree == 1 && w.residual < kTolWinding;
        worst_res = std::max(worst_res, w.residual);
    }
    double mass = ball_mass(jacobian_density(aux), c, 0.3);
    bool mass_ok = std::fabs(mass - kPi) <= kTolMass * kPi;
    std::vector<double> eps{1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512};
    auto one = concentration_fit(eps, [](double e) {
        Grid2 gr = build_grid(Rect{-1, -1, 1, 1}, e);
        return half_vortex_field(gr, default_center(gr));
    });
    auto two = concentration_fit(eps, [](double e) {
        Grid2 gr = build_grid(Rect{-1, -1, 1, 1}, e);
        return vortex_field(gr, {{{-0.5 + e / 2, e / 2}, 1}, {{0.5 + e / 2, e / 2}, 1}});
    });
    bool s1 = std::fabs(one.slope - kPi) <= kTolSlope * kPi, s2 = std::fabs(two.slope - 2 * kPi) <= kTolSlope * 2 * kPi;
    report(9, wind && mass_ok && s1 && s2,
           fmt("degree 1 at r=0.1,0.2,0.3 (max residual %.1e), ball mass %.5f", worst_res, mass) +
               fmt(", slopes %.4f pi and %.4f pi", one.slope / kPi, two.slope / kPi) + " (tolerances 0.1, 5%, 10%)");
}

void criterion10() {
    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> uni(0, 1);
    Grid2 g = build_grid(Rect{0, 0, 1, 1}, 1.0 / 16);
    std::vector<EnergySpec> specs{{lebwohl_lasher(), BondSet::NN2D, Scaling::Bulk, {}},
                                  {quartic_well(0.5), BondSet::NN2D, Scaling::Bulk, {}},
                                  {quartic_well(0.5), BondSet::Competition, Scaling::Bulk, {}},
                                  {one_minus(), BondSet::NN2D, Scaling::Bulk, {}}};
    bool flips = true;
    double rot = 0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Director2> u, flipped, turned;
        double phi = 2 * kPi * uni(rng);
        for (std::size_t k = 0; k < g.size(); ++k) {
            u.push_back(rand_dir(rng));
            flipped.push_back(uni(rng) < 0.5 ? -u.back() : u.back());
            turned.push_back(u.back().rotated(phi));
        }
        DirectorField2 a(g, u), b(g, flipped), c(g, turned);
        for (const auto& sp : specs) {
            double ea = bulk_energy(sp, a).total;
            flips = flips && ea == bulk_energy(sp, b).total;
            rot = std::max(rot, std::fabs(bulk_energy(sp, c).total - ea) / std::max(1e-300, std::fabs(ea)));
            double fa = first_order_energy(sp, a);
            flips = flips && fa == first_order_energy(sp, b);
            rot = std::max(rot, std::fabs(first_order_energy(sp, c) - fa) / std::max(1e-300, std::fabs(fa)));
        }
        flips = flips && concentration_energy(a) == concentration_energy(b);
    }
    Grid3 g3(6, 6, 6, 1.0 / 6);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Director3> u, f;
        for (std::size_t k = 0; k < g3.size(); ++k) {
            u.push_back(rand_dir3(rng));
            f.push_back(uni(rng) < 0.5 ? -u.back() : u.back());
        }
        EnergySpec sp{lebwohl_lasher(), BondSet::NN3DQuarterNNN, Scaling::Bulk, {}};
        flips = flips && bulk_energy(sp, DirectorField3(g3, u)).total == bulk_energy(sp, DirectorField3(g3, f)).total;
    }
    int violations = 0;
    double slack = INFINITY;
    Grid2 small = build_grid(Rect{0, 0, 1, 1}, 1.0 / 8);
    for (int k = 0; k < 1000; ++k) {
        std::vector<Director2> u;
        for (std::size_t i = 0; i < small.size(); ++i) u.push_back(rand_dir(rng));
        const Potential f = k % 2 ? quartic_well(0.3 + 0.4 * uni(rng)) : lebwohl_lasher();
        DualBound d = dual_lower_bound(DirectorField2(small, u), f);
        slack = std::min(slack, d.lhs - d.rhs);
        if (d.lhs < d.rhs - kTolDual * std::max(1.0, std::fabs(d.rhs))) ++violations;
    }
    report(10, flips && rot < kTolRotation && violations == 0,
           std::string(flips ? "sign flips bit-identical" : "sign flips CHANGED energies") +
               fmt(", max rotation change %.1e, dual bound min slack %.2e on 1000 fields", rot, slack) +
               " (tolerances exact, 1e-9, 1e-12)");
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> expected;
    for (int k = 1; k < argc; ++k) {
        if (std::strcmp(argv[k], "--expect-fail") == 0 && k + 1 < argc) {
            expected.insert(std::atoi(argv[++k]));
        } else {
            std::fprintf(stderr, "usage: acceptance [--expect-fail N]...\n");
            return 2;
        }
    }
    void (*all[])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                       criterion6, criterion7, criterion8, criterion9, criterion10};
    for (int k = 0; k < 10; ++k) {
        try {
            all[k]();
        } catch (const std::exception& e) {
            report(k + 1, false, std::string("threw: ") + e.what());
        }
    }
    std::printf("%zu of 10 criteria pass\n", 10 - failed.size());
    if (failed != expected) {
        std::printf("failing set differs from the expected set\n");
        return 1;
    }
    return 0;
}
