#include "nemlat/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "nemlat/errors.hpp"

namespace nemlat {

namespace {

const double kPi = std::numbers::pi;

struct Context {
    const Json& p;
    RunReport& report;
    std::string out;

    std::string path(const std::string& name) const {
        return out.empty() ? name : (std::filesystem::path(out) / name).string();
    }

    double num(const char* k) const { return p.at(k).get<double>(); }
    long integer(const char* k) const { return p.at(k).get<long>(); }
    std::string str(const char* k) const { return p.at(k).get<std::string>(); }
    std::vector<double> nums(const char* k) const { return p.at(k).get<std::vector<double>>(); }
    std::vector<long> ints(const char* k) const { return p.at(k).get<std::vector<long>>(); }
    std::vector<std::array<double, 2>> points(const char* k) const {
        return p.at(k).get<std::vector<std::array<double, 2>>>();
    }
    std::uint64_t seed() const { return p.at("seed").get<std::uint64_t>(); }

    ResultTable& table(std::string name, std::string op, std::vector<std::string> cols) {
        report.tables.push_back({std::move(name), std::move(op), std::move(cols), {}});
        return report.tables.back();
    }
    void check(std::string name, std::string op, double value, const std::string& rel, double bound) {
        bool pass = std::isfinite(value) && (rel == "<=" ? value <= bound : value >= bound);
        report.checks.push_back({std::move(name), std::move(op), value, rel, bound, pass});
        report.pass = report.pass && pass;
    }
};

ParamSpec num(const char* n, double d, const char* help) { return {n, ParamKind::Number, d, help}; }
ParamSpec integer(const char* n, long d, const char* help) { return {n, ParamKind::Integer, d, help}; }
ParamSpec nums(const char* n, std::vector<double> d, const char* help) { return {n, ParamKind::NumberList, d, help}; }
ParamSpec ints(const char* n, std::vector<long> d, const char* help) { return {n, ParamKind::IntegerList, d, help}; }
ParamSpec str(const char* n, const char* d, const char* help) { return {n, ParamKind::String, d, help}; }
ParamSpec pts(const char* n, std::vector<std::array<double, 2>> d, const char* help) {
    return {n, ParamKind::PointList, d, help};
}

double rel_error(double v, double ref) { return std::fabs(v - ref) / std::fabs(ref); }

Potential isotropic_potential(const std::string& name, double s) {
    if (name == "quartic-well" || name == "octic-well") return named_potential(name, {{"s", s}});
    if (name == "lebwohl-lasher" || name == "one-minus") return named_potential(name);
    throw ConfigError("potential must be one of lebwohl-lasher, one-minus, quartic-well, octic-well");
}

Director2 random_director(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ang(0, 2 * kPi);
    return Director2::from_angle(ang(rng));
}

Director3 random_director3(std::mt19937_64& rng) {
    std::normal_distribution<double> n01;
    for (;;) {
        double x = n01(rng), y = n01(rng), z = n01(rng), r = std::sqrt(x * x + y * y + z * z);
        if (r > 1e-6) return Director3(x / r, y / r, z / r);
    }
}

double max_entry(const Sym2& m) { return std::max({std::fabs(m.a), std::fabs(m.b), std::fabs(m.c)}); }
double max_entry(const Sym3& m) {
    return std::max({std::fabs(m.xx), std::fabs(m.xy), std::fabs(m.xz), std::fabs(m.yy), std::fabs(m.yz),
                     std::fabs(m.zz)});
}

void identities(Context& c) {
    std::mt19937_64 rng(c.seed());
    long n = c.integer("pairs");
    if (n < 1) throw ConfigError("pairs must be positive");
    double id_err = 0, dist_err = 0, rec2 = 0, rec3 = 0;
    std::uniform_real_distribution<double> uni(0, 1);
    const Sym2 half = QTensor2::half_identity().mat();
    for (long k = 0; k < n; ++k) {
        Director2 u = random_director(rng), v = random_director(rng);
        double lhs = std::sqrt(frobenius2(midpoint(u, v).mat() - half));
        id_err = std::max(id_err, std::fabs(lhs - std::numbers::sqrt2 / 2 * std::fabs(u.dot(v))));
        double d2 = frobenius2(q_of(u).mat() - q_of(v).mat());
        dist_err = std::max(dist_err, std::fabs(d2 - 2 * (1 - u.dot(v) * u.dot(v))));

        double r = 0.5 * std::sqrt(uni(rng)), th = 2 * kPi * uni(rng);
        QTensor2 q = QTensor2::from_deviatoric(r * std::cos(th), r * std::sin(th));
        rec2 = std::max(rec2, max_entry(reconstruct(decompose2(q)) - q.mat()));

        int parts = 1 + int(uni(rng) * 4);
        std::vector<double> w(static_cast<std::size_t>(parts));
        double tot = 0;
        for (double& x : w) tot += (x = uni(rng));
        Sym3 s;
        for (double x : w) {
            Director3 a = random_director3(rng);
            double cw = x / tot;
            s.xx += cw * a.x() * a.x();
            s.xy += cw * a.x() * a.y();
            s.xz += cw * a.x() * a.z();
            s.yy += cw * a.y() * a.y();
            s.yz += cw * a.y() * a.z();
            s.zz += cw * a.z() * a.z();
        }
        double fix = (1 - s.trace()) / 3;
        s.xx += fix;
        s.yy += fix;
        s.zz += fix;
        rec3 = std::max(rec3, max_entry(reconstruct(decompose3(QTensor3(s))) - s));
    }
    double tol_id = c.num("tol_identity"), tol_rec = c.num("tol_reconstruct");
    auto& t = c.table("properties", "qtensor", {"property", "op", "samples", "max_error", "tolerance"});
    t.rows.push_back({"midpoint_norm", "qtensor::midpoint", n, id_err, tol_id});
    t.rows.push_back({"projector_distance", "qtensor::q_of", n, dist_err, tol_id});
    t.rows.push_back({"decompose2", "qtensor::decompose2", n, rec2, tol_rec});
    t.rows.push_back({"decompose3", "qtensor::decompose3", n, rec3, tol_rec});
    c.check("midpoint_norm", "qtensor::midpoint", id_err, "<=", tol_id);
    c.check("projector_distance", "qtensor::q_of", dist_err, "<=", tol_id);
    c.check("decompose2", "qtensor::decompose2", rec2, "<=", tol_rec);
    c.check("decompose3", "qtensor::decompose3", rec3, "<=", tol_rec);
}

// lower convex envelope of the right-running minimum, one LP per node
std::vector<double> envelope_by_lp(const SampledFunction1D& h) {
    const auto& t = h.grid();
    std::vector<double> m(h.values());
    for (std::size_t k = m.size() - 1; k-- > 0;) m[k] = std::min(m[k], m[k + 1]);
    LowerEnvelope env(1, t, m);
    std::vector<double> out;
    out.reserve(t.size());
    for (double x : t) out.push_back(env.at({x}));
    return out;
}

void envelope(Context& c) {
    long nodes = c.integer("nodes");
    if (nodes < 3) throw ConfigError("nodes must be at least 3");
    std::mt19937_64 rng(c.seed());
    std::vector<std::pair<std::string, SampledFunction1D>> profiles;
    auto add = [&](std::string name, std::function<double(double)> fn) {
        profiles.emplace_back(std::move(name), SampledFunction1D::uniform(int(nodes), fn));
    };
    add("lebwohl-lasher", [](double x) { return -x * x; });
    for (int p : {1, 2, 3}) add("-x^" + std::to_string(p), [p](double x) { return -std::pow(x, p); });
    add("(x^2-1/4)^2", [](double x) { return (x * x - 0.25) * (x * x - 0.25); });
    add("(1-x)^2", [](double x) { return (1 - x) * (1 - x); });
    std::uniform_real_distribution<double> uni(-1, 1);
    for (int r = 0; r < 3; ++r) {
        std::vector<double> kx{0}, ky{uni(rng)};
        for (int k = 1; k <= 10; ++k) {
            kx.push_back(k / 10.0);
            ky.push_back(uni(rng));
        }
        SampledFunction1D knots(kx, ky);
        add("random-" + std::to_string(r + 1), [knots](double x) { return knots(x); });
    }
    double tol = c.num("tol_oracle");
    auto& t = c.table("oracle", "envelope::monotone_convex_envelope", {"profile", "nodes", "max_abs_diff"});
    double worst = 0;
    for (const auto& [name, h] : profiles) {
        auto fast = monotone_convex_envelope(h).values();
        auto lp = envelope_by_lp(h);
        double d = 0;
        for (std::size_t k = 0; k < fast.size(); ++k) d = std::max(d, std::fabs(fast[k] - lp[k]));
        t.rows.push_back({name, nodes, d});
        worst = std::max(worst, d);
    }
    c.check("oracle_max_abs_diff", "envelope::monotone_convex_envelope", worst, "<=", tol);

    double l = c.num("l"), m = c.num("m");
    Potential nr = example_noradial(l, m);
    auto nodes2 = disk_nodes(int(c.integer("angles")), int(c.integer("radii")));
    for (const auto& q : nr.marked_points) nodes2.push_back(q);
    SampledSurface s = sample_fhat(nr, nodes2, int(c.integer("M")));
    auto G = noradial_points(l, m);
    auto& nt = c.table("noradial", "envelope::envelope_at", {"kind", "q1", "q2", "value"});
    double zero_worst = 0, outside_min = INFINITY;
    auto eval = [&](const std::string& kind, double q1, double q2) {
        double v = envelope_at(s, q1, q2);
        nt.rows.push_back({kind, q1, q2, v});
        return v;
    };
    for (const auto& g : G) zero_worst = std::max(zero_worst, std::fabs(eval("vertex", g[0], g[1])));
    std::exponential_distribution<double> ex(1.0);
    for (int k = 0; k < int(c.integer("combinations")); ++k) {
        std::array<double, 4> w{};
        double tot = 0;
        for (double& x : w) tot += (x = ex(rng));
        double q1 = 0, q2 = 0;
        for (int i = 0; i < 4; ++i) {
            q1 += w[i] / tot * G[i][0];
            q2 += w[i] / tot * G[i][1];
        }
        zero_worst = std::max(zero_worst, std::fabs(eval("combination", q1, q2)));
    }
    // edge midpoints pushed outward along the edge normal
    double cx = 0, cy = 0;
    for (const auto& g : G) {
        cx += g[0] / 4;
        cy += g[1] / 4;
    }
    std::vector<std::array<double, 2>> hull(G.begin(), G.end());
    std::sort(hull.begin(), hull.end(), [&](const auto& a, const auto& b) {
        return std::atan2(a[1] - cy, a[0] - cx) < std::atan2(b[1] - cy, b[0] - cx);
    });
    double margin = c.num("margin");
    for (std::size_t k = 0; k < 4; ++k) {
        const auto &a = hull[k], &b = hull[(k + 1) % 4];
        double ex_ = b[0] - a[0], ey = b[1] - a[1], len = std::hypot(ex_, ey);
        if (len < 1e-12) continue;
        double nx = ey / len, ny = -ex_ / len;
        double mx = 0.5 * (a[0] + b[0]), my = 0.5 * (a[1] + b[1]);
        if ((mx - cx) * nx + (my - cy) * ny < 0) {
            nx = -nx;
            ny = -ny;
        }
        outside_min = std::min(outside_min, eval("outside", mx + margin * nx, my + margin * ny));
    }
    c.check("noradial_zero_set", "envelope::envelope_at", zero_worst, "<=", c.num("tol_zero"));
    c.check("noradial_outside", "envelope::envelope_at", outside_min, ">=", c.num("min_outside"));
}

void homogenize2d(Context& c) {
    std::string name = c.str("potential");
    Potential f = isotropic_potential(name, c.num("s"));
    CellProblemSpec2 spec;
    spec.window = int(c.integer("window"));
    spec.M = int(c.integer("M"));
    spec.rho = c.num("rho");
    spec.anneal.seed = c.seed();
    double tol_abs = c.num("tol_abs"), tol_rel = c.num("tol_rel");
    Hom2D hom(f);
    auto& t = c.table("cell_problem", "homogenize::cell_problem_min",
                      {"q1", "q2", "value_per_volume", "reference", "abs_error", "mean_distance", "exhaustive"});
    for (const auto& q : c.points("targets")) {
        spec.target = QTensor2::from_deviatoric(q[0], q[1]);
        auto r = cell_problem_min(spec, f);
        double ref = hom(spec.target);
        double err = std::fabs(r.value_per_volume - ref);
        t.rows.push_back({q[0], q[1], r.value_per_volume, ref, err, r.distance, r.exhaustive ? 1 : 0});
        std::string stem = "cell_" + std::to_string(t.rows.size() - 1);
        std::ostringstream field;
        write_directors(field, r.best);
        c.report.files.push_back({stem + "_config.csv", field.str()});
        c.report.files.push_back({stem + ".json", to_json(r, c.path(stem + "_config.csv")).dump(2) + "\n"});
        c.check("cell(" + format_number(q[0]) + "," + format_number(q[1]) + ")", "homogenize::cell_problem_min", err,
                "<=", tol_abs + tol_rel * std::fabs(ref));
    }
}

void homogenize3d(Context& c) {
    Potential f = isotropic_potential(c.str("potential"), c.num("s"));
    Fhat3DOptions opt;
    opt.seed = c.seed();
    auto rec = recovery_3d(QTensor3::third_identity(), f, int(c.integer("window")), opt);
    Director3 e3(0, 0, 1);
    auto uni = recovery_3d({e3, e3, e3, e3}, f, int(c.integer("uniform_window")));
    double uni_ref = 9 * f(e3, e3);
    auto& t = c.table("recovery", "homogenize::recovery_3d",
                      {"state", "window", "density", "boundary_density", "reference", "rel_error"});
    double e1 = rel_error(rec.density, rec.target()), e2 = rel_error(uni.density, uni_ref);
    t.rows.push_back({"third-identity", c.integer("window"), rec.density, rec.boundary_density, rec.target(), e1});
    t.rows.push_back({"uniform", c.integer("uniform_window"), uni.density, uni.boundary_density, uni_ref, e2});
    c.check("third_identity", "homogenize::recovery_3d", e1, "<=", c.num("tol_rel"));
    c.check("uniform", "homogenize::recovery_3d", e2, "<=", c.num("tol_uniform"));
}

// |h'(1)| by a second-order one-sided difference
double end_slope(const Potential& f) {
    const double d = 1e-5;
    return std::fabs((3 * f.profile(1) - 4 * f.profile(1 - d) + f.profile(1 - 2 * d)) / (2 * d));
}

void gradient(Context& c) {
    Potential f = isotropic_potential(c.str("potential"), c.num("s"));
    double a = c.num("amplitude");
    auto theta = [a](const Point& x) { return a * std::sin(2 * kPi * x[0]) * std::sin(2 * kPi * x[1]); };
    // |grad Q|^2 = 2 |grad theta|^2 for Q = u (x) u
    auto inner = [a](double x) {
        return boost::math::quadrature::gauss<double, 30>::integrate(
            [a, x](double y) {
                double tx = 2 * kPi * a * std::cos(2 * kPi * x) * std::sin(2 * kPi * y);
                double ty = 2 * kPi * a * std::sin(2 * kPi * x) * std::cos(2 * kPi * y);
                return 2 * (tx * tx + ty * ty);
            },
            0.0, 1.0);
    };
    double dirichlet = boost::math::quadrature::gauss<double, 30>::integrate(inner, 0.0, 1.0);
    double limit = 0.5 * end_slope(f) * dirichlet;
    EnergySpec spec{f, BondSet::NN2D, Scaling::FirstOrder, {}};
    auto& t = c.table("sweep", "energy::first_order_energy", {"n", "eps", "energy", "limit", "rel_error"});
    std::vector<double> errs;
    for (long n : c.ints("n")) {
        if (n < 2) throw ConfigError("grid sizes must be at least 2");
        Grid2 g = build_grid(Rect{0, 0, 1, 1}, 1.0 / double(n));
        double e = first_order_energy(spec, field_from_angle(g, theta));
        errs.push_back(rel_error(e, limit));
        t.rows.push_back({n, 1.0 / double(n), e, limit, errs.back()});
    }
    if (errs.empty()) throw ConfigError("n must not be empty");
    long increases = 0;
    for (std::size_t k = 1; k < errs.size(); ++k) increases += errs[k] >= errs[k - 1];
    c.check("final_rel_error", "energy::first_order_energy", errs.back(), "<=", c.num("tol_rel"));
    c.check("error_increases", "energy::first_order_energy", double(increases), "<=", 0);
}

void counterexample(Context& c) {
    std::vector<double> eps;
    for (long n : c.ints("n")) {
        if (n < 2) throw ConfigError("grid sizes must be at least 2");
        eps.push_back(1.0 / double(n));
    }
    auto rows = hedgehog_counterexample(eps);
    auto& t = c.table("hedgehog", "energy::hedgehog_counterexample", {"eps", "value", "contrast", "bound"});
    double worst = -INFINITY;
    for (const auto& r : rows) {
        t.rows.push_back({r.eps, r.value, r.contrast, hedgehog_bound()});
        worst = std::max(worst, r.value);
    }
    c.check("max_value", "energy::hedgehog_counterexample", worst, "<=", c.num("bound"));
}

void oscillation(Context& c) {
    std::string name = c.str("potential");
    if (name != "quartic-well" && name != "octic-well") throw ConfigError("potential must be quartic-well or octic-well");
    long n = c.integer("n");
    if (n < 2) throw ConfigError("n must be at least 2");
    double a = c.num("twist");
    Grid2 g = build_grid(Rect{0, 0, 1, 1}, 1.0 / double(n));
    auto& t = c.table("oscillation", "energy::first_order_energy",
                      {"s", "eps", "nn", "nnn", "total", "limit", "rel_error"});
    for (double s : c.nums("s")) {
        Potential f = isotropic_potential(name, s);
        auto field = oscillating_recovery(g, [a](const Point& x) { return a * x[0]; }, s);
        double total = first_order_energy({f, BondSet::Competition, Scaling::FirstOrder, {}}, field);
        double nn = first_order_energy({f, BondSet::NN2D, Scaling::FirstOrder, {}}, field);
        // Q = 1/2 I + (s/2)(n (x) n - n^perp (x) n^perp): |grad Q|^2 = 2 s^2 |grad phi|^2 on the unit square
        double limit = 2 / (s * s) * 2 * s * s * a * a;
        double err = rel_error(total, limit);
        t.rows.push_back({s, g.eps(), nn, total - nn, total, limit, err});
        c.check("s=" + format_number(s), "energy::first_order_energy", err, "<=", c.num("tol_rel"));
    }
}

void vortex(Context& c) {
    auto charges = c.ints("charges");
    if (charges.empty()) throw ConfigError("charges must not be empty");
    std::size_t m = charges.size();
    for (long q : charges)
        if (q == 0) throw ConfigError("charges must be nonzero");
    auto centers = [&](double e) {
        std::vector<Defect> d;
        for (std::size_t k = 0; k < m; ++k) {
            double x = m == 1 ? 0.0 : -0.5 + double(k) / double(m - 1);
            d.push_back({{x + e / 2, e / 2}, int(charges[k])});
        }
        return d;
    };
    double sep = m == 1 ? INFINITY : 1.0 / double(m - 1);
    long mass_n = c.integer("mass_n");
    if (mass_n < 8) throw ConfigError("mass_n must be at least 8");
    Grid2 g = build_grid(Rect{-1, -1, 1, 1}, 1.0 / double(mass_n));
    auto defects = centers(g.eps());
    auto aux = aux_map(vortex_field(g, defects));
    auto jac = jacobian_density(aux);

    auto& wt = c.table("winding", "vortex::winding_number", {"defect", "radius", "degree", "raw", "residual"});
    double tol_w = c.num("tol_winding");
    for (std::size_t k = 0; k < m; ++k) {
        const Point& z = defects[k].center;
        for (double r : c.nums("radii")) {
            if (r >= sep / 2 || std::fabs(z[0]) + r >= 1 - g.eps()) continue;
            auto w = winding_number(aux, z, r);
            wt.rows.push_back({long(k), r, long(w.degree), w.raw, w.residual});
            std::string tag = "winding[" + std::to_string(k) + "](" + format_number(r) + ")";
            c.check(tag + ".degree_error", "vortex::winding_number", std::fabs(w.degree - defects[k].charge), "<=", 0);
            c.check(tag + ".residual", "vortex::winding_number", w.residual, "<=", tol_w);
        }
    }
    auto& mt = c.table("ball_mass", "vortex::ball_mass", {"defect", "radius", "mass", "reference", "rel_error"});
    double rm = c.num("mass_radius");
    if (rm < sep / 2) {
        for (std::size_t k = 0; k < m; ++k) {
            double ref = kPi * defects[k].charge, mass = ball_mass(jac, defects[k].center, rm);
            mt.rows.push_back({long(k), rm, mass, ref, rel_error(mass, ref)});
            c.check("mass[" + std::to_string(k) + "]", "vortex::ball_mass", rel_error(mass, ref), "<=",
                    c.num("tol_mass"));
        }
    }
    std::vector<double> eps;
    for (long n : c.ints("n")) {
        if (n < 2) throw ConfigError("grid sizes must be at least 2");
        eps.push_back(1.0 / double(n));
    }
    auto fit = concentration_fit(eps, [&](double e) { return vortex_field(build_grid(Rect{-1, -1, 1, 1}, e), centers(e)); });
    auto& ft = c.table("concentration", "vortex::concentration_fit", {"eps", "log_inv_eps", "energy"});
    for (std::size_t k = 0; k < fit.eps.size(); ++k)
        ft.rows.push_back({fit.eps[k], std::fabs(std::log(fit.eps[k])), fit.energy[k]});
    double total_charge = 0;
    for (long q : charges) total_charge += std::fabs(double(q));
    double ref = kPi * total_charge;
    auto& st = c.table("fit", "vortex::concentration_fit", {"slope", "intercept", "residual", "reference", "rel_error"});
    st.rows.push_back({fit.slope, fit.intercept, fit.residual, ref, rel_error(fit.slope, ref)});
    c.check("slope", "vortex::concentration_fit", rel_error(fit.slope, ref), "<=", c.num("tol_slope"));
}

void prefactor(Context& c) {
    auto& t = c.table("prefactor", "energy::long_range_prefactor", {"set", "R", "entries", "prefactor"});
    std::vector<LongRangeCoefficient> nn{{{1, 0}, 1}, {{-1, 0}, 1}, {{0, 1}, 1}, {{0, -1}, 1}};
    double p_nn = long_range_prefactor(nn);
    t.rows.push_back({"nearest-neighbour", 1.0, long(nn.size()), p_nn});
    c.check("nearest_neighbour", "energy::long_range_prefactor", std::fabs(p_nn - 4 * kPi), "<=", c.num("tol"));
    double prev = p_nn;
    long decreases = 0;
    for (double R : c.nums("R")) {
        if (!(R >= 1)) throw ConfigError("cut-off radii must be at least 1");
        auto co = power_law_coefficients(R);
        double p = long_range_prefactor(co);
        t.rows.push_back({"power-law", R, long(co.size()), p});
        decreases += p < prev - 1e-15;
        prev = p;
    }
    c.check("monotone_in_R", "energy::long_range_prefactor", double(decreases), "<=", 0);
}

using Runner = void (*)(Context&);

struct Entry {
    ExperimentInfo info;
    Runner run;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> r = [] {
        const double h2 = std::numbers::sqrt2 / 2;
        std::vector<Entry> v;
        v.push_back({{"identities", "tensor identity and decomposition suites", true,
                      {integer("pairs", 10000, "random samples per property"),
                       num("tol_identity", 1e-12, "identity tolerance"),
                       num("tol_reconstruct", 1e-10, "decomposition tolerance")}},
                     identities});
        v.push_back({{"envelope", "h++ against an LP envelope, non-radial example", true,
                      {integer("nodes", 201, "profile grid nodes"), num("tol_oracle", 1e-8, "oracle tolerance"),
                       num("l", h2, "non-radial parameter l"), num("m", h2, "non-radial parameter m"),
                       integer("angles", 32, "disk grid angles"), integer("radii", 16, "disk grid radii"),
                       integer("M", 360, "frame scan resolution"),
                       integer("combinations", 100, "random convex combinations"),
                       num("tol_zero", 1e-9, "zero-set tolerance"), num("margin", 0.05, "offset outside the hull"),
                       num("min_outside", 0.1, "lower bound outside the hull")}},
                     envelope});
        v.push_back({{"homogenize2d", "cell problem against 4 h++", true,
                      {str("potential", "quartic-well", "isotropic potential"), num("s", 0.5, "well position"),
                       integer("window", 8, "cell side h"), integer("M", 64, "angle states"),
                       num("rho", 0.05, "mean constraint radius"),
                       pts("targets", {{0, 0}, {0.125, 0}, {0.15, 0.2}}, "deviatoric targets (q1,q2)"),
                       num("tol_abs", 0.05, "absolute tolerance"), num("tol_rel", 0.0, "relative tolerance")}},
                     homogenize2d});
        v.push_back({{"homogenize3d", "periodic recovery cell against 3/2 of the certificate", true,
                      {str("potential", "lebwohl-lasher", "isotropic potential"), num("s", 0.5, "well position"),
                       integer("window", 8, "recovery window"), integer("uniform_window", 16, "uniform window"),
                       num("tol_rel", 0.03, "relative tolerance"),
                       num("tol_uniform", 0.01, "uniform-state tolerance")}},
                     homogenize3d});
        v.push_back({{"gradient", "first-order sweep against the Dirichlet limit", false,
                      {str("potential", "lebwohl-lasher", "isotropic potential"), num("s", 0.5, "well position"),
                       num("amplitude", 1.0, "angle amplitude"), ints("n", {32, 64, 128, 256}, "grid sizes 1/eps"),
                       num("tol_rel", 0.02, "final relative error")}},
                     gradient});
        v.push_back({{"counterexample", "hedgehog sum under (1-x)^2", false,
                      {ints("n", {32, 64, 128, 256, 512}, "grid sizes 1/eps"), num("bound", 26.0, "upper bound")}},
                     counterexample});
        v.push_back({{"oscillation", "competition energy of the twisted checkerboard", false,
                      {str("potential", "quartic-well", "quartic-well or octic-well"), nums("s", {0.5, h2}, "wells"),
                       integer("n", 256, "grid size 1/eps"), num("twist", 1.0, "director twist rate"),
                       num("tol_rel", 0.05, "relative tolerance")}},
                     oscillation});
        v.push_back({{"vortex", "degree, Jacobian mass and concentration slope", false,
                      {ints("charges", {1}, "defect degrees along the x axis"),
                       ints("n", {64, 128, 256, 512}, "grid sizes for the fit"),
                       nums("radii", {0.1, 0.2, 0.3}, "loop radii"), integer("mass_n", 256, "grid size for loops"),
                       num("mass_radius", 0.3, "ball radius"), num("tol_winding", 0.1, "winding residual"),
                       num("tol_mass", 0.05, "ball mass tolerance"), num("tol_slope", 0.1, "slope tolerance")}},
                     vortex});
        v.push_back({{"prefactor", "long-range concentration constant", false,
                      {nums("R", {1.5, 2, 3, 4}, "power-law cut-off radii"), num("tol", 1e-12, "absolute tolerance")}},
                     prefactor});
        return v;
    }();
    return r;
}

const Entry& find_entry(const std::string& name) {
    for (const auto& e : registry())
        if (e.info.name == name) return e;
    throw ConfigError("unknown experiment '" + name + "'");
}

bool kind_matches(ParamKind k, const Json& v) {
    auto all = [&](auto pred) {
        if (!v.is_array()) return false;
        for (const auto& x : v)
            if (!pred(x)) return false;
        return true;
    };
    auto is_int = [](const Json& x) { return x.is_number_integer(); };
    auto is_num = [](const Json& x) { return x.is_number(); };
    switch (k) {
    case ParamKind::Number: return v.is_number();
    case ParamKind::Integer: return v.is_number_integer();
    case ParamKind::NumberList: return all(is_num);
    case ParamKind::IntegerList: return all(is_int);
    case ParamKind::PointList:
        return all([&](const Json& x) { return x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number(); });
    case ParamKind::String: return v.is_string();
    }
    return false;
}

const char* kind_name(ParamKind k) {
    switch (k) {
    case ParamKind::Number: return "number";
    case ParamKind::Integer: return "integer";
    case ParamKind::NumberList: return "number list";
    case ParamKind::IntegerList: return "integer list";
    case ParamKind::PointList: return "list of [q1,q2]";
    case ParamKind::String: return "string";
    }
    return "";
}

std::string csv_cell(const Json& v) {
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_number(v.get<double>());
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s.find_first_of(",\n\"") != std::string::npos) throw InternalConsistency("CSV cell needs quoting: " + s);
        return s;
    }
    throw InternalConsistency("unsupported table cell");
}

}  // namespace

Json ExperimentInfo::default_config() const {
    Json p = Json::object();
    if (stochastic) p["seed"] = 1;
    for (const auto& s : params) p[s.name] = s.default_value;
    return {{"experiment", name}, {"parameters", p}};
}

const std::vector<ExperimentInfo>& list_experiments() {
    static const std::vector<ExperimentInfo> v = [] {
        std::vector<ExperimentInfo> out;
        for (const auto& e : registry()) out.push_back(e.info);
        return out;
    }();
    return v;
}

const ExperimentInfo& find_experiment(const std::string& name) { return find_entry(name).info; }

ExperimentConfig parse_config(const Json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    for (const auto& [k, v] : doc.items()) {
        if (k == "experiment") {
            if (!v.is_string()) throw ConfigError("experiment must be a string");
            c.experiment = v.get<std::string>();
        } else if (k == "parameters") {
            if (!v.is_object()) throw ConfigError("parameters must be an object");
            c.parameters = v;
        } else if (k == "output") {
            if (!v.is_string()) throw ConfigError("output must be a string");
            c.output = v.get<std::string>();
        } else {
            throw ConfigError("unknown config key '" + k + "'");
        }
    }
    return c;
}

Json resolve_parameters(const ExperimentConfig& c) {
    const ExperimentInfo& info = find_experiment(c.experiment);
    if (!c.parameters.is_object()) throw ConfigError("parameters must be an object");
    Json out = Json::object();
    if (info.stochastic) {
        if (c.seed) {
            out["seed"] = *c.seed;
        } else if (c.parameters.contains("seed")) {
            const Json& s = c.parameters["seed"];
            if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
                throw ConfigError("seed must be a nonnegative integer");
            out["seed"] = s.get<std::uint64_t>();
        } else {
            throw ConfigError("experiment '" + info.name + "' is stochastic and needs a seed");
        }
    } else if (c.seed || c.parameters.contains("seed")) {
        throw ConfigError("experiment '" + info.name + "' is deterministic and takes no seed");
    }
    for (const auto& [k, v] : c.parameters.items()) {
        if (k == "seed") continue;
        auto it = std::find_if(info.params.begin(), info.params.end(), [&](const ParamSpec& s) { return s.name == k; });
        if (it == info.params.end()) throw ConfigError("unknown parameter '" + k + "' for " + info.name);
        if (!kind_matches(it->kind, v)) throw ConfigError("parameter '" + k + "' must be a " + kind_name(it->kind));
    }
    for (const auto& s : info.params) out[s.name] = c.parameters.contains(s.name) ? c.parameters[s.name] : s.default_value;
    return out;
}

Json RunReport::summary() const {
    Json tabs = Json::array();
    for (const auto& t : tables) {
        Json rows = Json::array();
        for (const auto& r : t.rows) rows.push_back(r);
        tabs.push_back({{"name", t.name}, {"op", t.op}, {"columns", t.columns}, {"rows", rows}});
    }
    Json cs = Json::array();
    for (const auto& ch : checks)
        cs.push_back({{"name", ch.name}, {"op", ch.op}, {"value", ch.value}, {"relation", ch.relation},
                      {"bound", ch.bound}, {"pass", ch.pass}});
    return {{"schema", 1},      {"experiment", experiment}, {"parameters", parameters}, {"pass", pass},
            {"checks", cs},     {"tables", tabs},           {"wall_seconds", wall_seconds},
            {"artifacts", artifacts}};
}

void write_report(RunReport& r, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir);
    r.artifacts.clear();
    for (const auto& t : r.tables) {
        fs::path p = fs::path(dir) / (t.name + ".csv");
        std::ofstream os(p);
        if (!os) throw ConfigError("cannot write " + p.string());
        CsvTable csv{t.columns, {}};
        for (const auto& row : t.rows) {
            std::vector<std::string> cells;
            for (const auto& v : row) cells.push_back(csv_cell(v));
            csv.rows.push_back(std::move(cells));
        }
        write_csv(os, csv);
        if (!os) throw ConfigError("cannot write " + p.string());
        r.artifacts.push_back(p.string());
    }
    for (const auto& [name, text] : r.files) {
        fs::path p = fs::path(dir) / name;
        std::ofstream os(p);
        if (!(os << text)) throw ConfigError("cannot write " + p.string());
        r.artifacts.push_back(p.string());
    }
    fs::path p = fs::path(dir) / "summary.json";
    r.artifacts.push_back(p.string());
    std::ofstream os(p);
    if (!os) throw ConfigError("cannot write " + p.string());
    os << r.summary().dump(2) << '\n';
    if (!os) throw ConfigError("cannot write " + p.string());
}

RunReport run(const ExperimentConfig& c) {
    const Entry& e = find_entry(c.experiment);
    RunReport report;
    report.experiment = e.info.name;
    report.parameters = resolve_parameters(c);
    auto t0 = std::chrono::steady_clock::now();
    Context ctx{report.parameters, report, c.output};
    try {
        e.run(ctx);
    } catch (const InvalidSpec& ex) {
        throw ConfigError(ex.what());
    } catch (const InvalidScaling& ex) {
        throw ConfigError(ex.what());
    } catch (const DegenerateGrid& ex) {
        throw ConfigError(ex.what());
    } catch (const InsufficientData& ex) {
        throw ConfigError(ex.what());
    } catch (const InvalidQTensor& ex) {
        throw ConfigError(ex.what());
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!c.output.empty()) write_report(report, c.output);
    return report;
}

Json list_json() {
    Json out = Json::array();
    for (const auto& info : list_experiments()) {
        Json ps = Json::array();
        for (const auto& s : info.params)
            ps.push_back({{"name", s.name}, {"type", kind_name(s.kind)}, {"default", s.default_value}, {"help", s.help}});
        out.push_back({{"name", info.name}, {"summary", info.summary}, {"stochastic", info.stochastic},
                       {"parameters", ps}, {"default_config", info.default_config()}});
    }
    return out;
}

}  // namespace nemlat
