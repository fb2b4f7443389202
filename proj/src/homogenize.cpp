#include "nemlat/homogenize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "nemlat/errors.hpp"
#include "nemlat/summation.hpp"

namespace nemlat {

namespace {

// discrete cell model: finitely many states per site, tabulated pair energies
struct Model {
    int sites = 0;
    int states = 0;
    std::vector<std::vector<double>> tables;            // per class, states x states
    std::vector<std::vector<std::vector<int>>> nbrs;    // per class, per site, ordered bonds out of the site
    std::vector<std::vector<double>> feature;           // per state
    std::vector<double> target, metric;
    double rho = 0;
};

using Config = std::vector<int>;

double pair(const Model& m, std::size_t c, int a, int b) { return m.tables[c][std::size_t(a) * m.states + b]; }

double energy(const Model& m, const Config& s) {
    Accumulator acc;
    for (std::size_t c = 0; c < m.tables.size(); ++c)
        for (int i = 0; i < m.sites; ++i)
            for (int j : m.nbrs[c][i]) acc.add(pair(m, c, s[i], s[j]));
    return acc.value();
}

std::vector<double> feature_sum(const Model& m, const Config& s) {
    std::vector<double> sum(m.target.size(), 0.0);
    for (int i = 0; i < m.sites; ++i)
        for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += m.feature[s[i]][k];
    return sum;
}

double distance(const Model& m, const std::vector<double>& sum) {
    double d = 0;
    for (std::size_t k = 0; k < sum.size(); ++k) {
        double x = sum[k] / m.sites - m.target[k];
        d += m.metric[k] * x * x;
    }
    return std::sqrt(d);
}

double penalty(const Model& m, double lambda, double dist) {
    double x = std::max(0.0, dist - m.rho);
    return lambda * x * x * m.sites;
}

double site_delta(const Model& m, const Config& s, int i, int b) {
    int a = s[i];
    double d = 0;
    for (std::size_t c = 0; c < m.tables.size(); ++c)
        for (int j : m.nbrs[c][i]) {
            int t = s[j];
            d += pair(m, c, b, t) + pair(m, c, t, b) - pair(m, c, a, t) - pair(m, c, t, a);
        }
    return d;
}

struct Best {
    Config config;
    double energy = std::numeric_limits<double>::infinity();
    double residual = std::numeric_limits<double>::infinity();  // smallest dist - rho seen

    void offer(const Config& s, double e, double dist, double rho) {
        residual = std::min(residual, dist - rho);
        if (dist <= rho + 1e-9 && e < energy - 1e-12) {
            energy = e;
            config = s;
        }
    }
};

Best exhaustive(const Model& m) {
    Best best;
    Config s(std::size_t(m.sites), 0);
    while (true) {
        best.offer(s, energy(m, s), distance(m, feature_sum(m, s)), m.rho);
        int i = 0;
        while (i < m.sites && ++s[i] == m.states) s[i++] = 0;
        if (i == m.sites) break;
    }
    return best;
}

class Annealer {
public:
    Annealer(const Model& m, const AnnealOptions& o) : m_(m), o_(o), rng_(o.seed) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& t : m.tables)
            for (double x : t) lo = std::min(lo, x), hi = std::max(hi, x);
        t0_ = hi > lo ? 0.1 * (hi - lo) : 1e-3;
    }

    Best run(const std::vector<Config>& seeds) {
        Best best;
        for (const auto& s : seeds) {
            best.offer(s, energy(m_, s), distance(m_, feature_sum(m_, s)), m_.rho);
        }
        Config current = seeds.front();
        double lambda = o_.lambda0;
        for (int r = 0; r < o_.restarts; ++r, lambda *= 10) {
            // start from the cheapest candidate under the current penalty
            std::vector<const Config*> cands;
            for (const auto& s : seeds) cands.push_back(&s);
            cands.push_back(&current);
            if (!best.config.empty()) cands.push_back(&best.config);
            double bv = std::numeric_limits<double>::infinity();
            Config start;
            for (const Config* c : cands) {
                double v = energy(m_, *c) + penalty(m_, lambda, distance(m_, feature_sum(m_, *c)));
                if (v < bv) bv = v, start = *c;
            }
            current = anneal(start, lambda, best);
            current = quench(current, lambda, best);
        }
        return best;
    }

private:
    Config anneal(Config s, double lambda, Best& best) {
        std::uniform_int_distribution<int> site(0, m_.sites - 1), state(0, m_.states - 1), small(1, 3);
        std::uniform_real_distribution<double> U(0, 1);
        std::bernoulli_distribution local(0.5);
        double e = energy(m_, s);
        auto sum = feature_sum(m_, s);
        double dist = distance(m_, sum);
        double T = t0_;
        long steps = long(o_.steps_per_site) * m_.sites;
        for (int k = 0; k < o_.temperatures; ++k, T *= o_.cooling) {
            for (long n = 0; n < steps; ++n) {
                int i = site(rng_);
                int b;
                if (local(rng_)) {
                    int d = small(rng_) * (U(rng_) < 0.5 ? -1 : 1);
                    b = ((s[i] + d) % m_.states + m_.states) % m_.states;
                } else {
                    b = state(rng_);
                }
                if (b == s[i]) continue;
                double de = site_delta(m_, s, i, b);
                auto nsum = sum;
                for (std::size_t q = 0; q < nsum.size(); ++q) nsum[q] += m_.feature[b][q] - m_.feature[s[i]][q];
                double nd = distance(m_, nsum);
                double dtot = de + penalty(m_, lambda, nd) - penalty(m_, lambda, dist);
                if (dtot <= 0 || U(rng_) < std::exp(-dtot / T)) {
                    s[i] = b;
                    e += de;
                    sum = std::move(nsum);
                    dist = nd;
                    if (dist <= m_.rho + 1e-9 && e < best.energy - 1e-12) best.offer(s, energy(m_, s), dist, m_.rho);
                }
            }
            best.offer(s, energy(m_, s), distance(m_, feature_sum(m_, s)), m_.rho);
        }
        return s;
    }

    Config quench(Config s, double lambda, Best& best) {
        auto sum = feature_sum(m_, s);
        double dist = distance(m_, sum);
        for (int sweep = 0; sweep < 100; ++sweep) {
            bool improved = false;
            for (int i = 0; i < m_.sites; ++i) {
                int arg = s[i];
                double bestd = 0;
                std::vector<double> bsum;
                double bdist = dist;
                for (int b = 0; b < m_.states; ++b) {
                    if (b == s[i]) continue;
                    auto nsum = sum;
                    for (std::size_t q = 0; q < nsum.size(); ++q) nsum[q] += m_.feature[b][q] - m_.feature[s[i]][q];
                    double nd = distance(m_, nsum);
                    double d = site_delta(m_, s, i, b) + penalty(m_, lambda, nd) - penalty(m_, lambda, dist);
                    if (d < bestd - 1e-14) bestd = d, arg = b, bsum = nsum, bdist = nd;
                }
                if (arg != s[i]) {
                    s[i] = arg;
                    sum = std::move(bsum);
                    dist = bdist;
                    improved = true;
                }
            }
            if (!improved) break;
        }
        best.offer(s, energy(m_, s), distance(m_, feature_sum(m_, s)), m_.rho);
        return s;
    }

    const Model& m_;
    AnnealOptions o_;
    std::mt19937_64 rng_;
    double t0_;
};

Best solve(const Model& m, Optimizer opt, const AnnealOptions& a, const std::vector<Config>& seeds, bool& exhaust) {
    double count = std::pow(double(m.states), double(m.sites));
    if (opt == Optimizer::Exhaustive && count > kExhaustiveLimit)
        throw InvalidSpec("too many configurations for exhaustive search");
    exhaust = opt == Optimizer::Exhaustive || (opt == Optimizer::Auto && count <= kExhaustiveLimit);
    Best best = exhaust ? exhaustive(m) : Annealer(m, a).run(seeds);
    if (best.config.empty()) throw Infeasible("mean constraint not met by any configuration", best.residual);
    return best;
}

void check_anneal(const AnnealOptions& a) {
    if (a.steps_per_site < 1 || a.temperatures < 1 || a.restarts < 1 || !(a.cooling > 0 && a.cooling <= 1) ||
        !(a.lambda0 > 0))
        throw InvalidSpec("invalid annealing schedule");
}

void check_common(double rho, int window) {
    if (!(rho > 0 && rho <= std::numbers::sqrt2 + 1e-15)) throw InvalidSpec("rho must lie in (0, sqrt 2]");
    if (window < 2) throw InvalidSpec("window must be at least 2");
}

int snap(double theta, int M) {
    long k = std::lround(theta * M / std::numbers::pi);
    return int(((k % M) + M) % M);
}

}  // namespace

CellProblemResult2 cell_problem_min(const CellProblemSpec2& spec, const Potential& f) {
    check_common(spec.rho, spec.window);
    if (spec.M < 4) throw InvalidSpec("angular resolution must be at least 4");
    check_anneal(spec.anneal);
    if (spec.bonds != BondSet::NN2D && spec.bonds != BondSet::Competition)
        throw InvalidSpec("cell problem supports nearest-neighbour and competition bonds");
    const int h = spec.window, M = spec.M;
    Grid2 g(Rect{0, 0, double(h - 1), double(h - 1)}, 1.0);

    Model m;
    m.sites = int(g.size());
    m.states = M;
    std::vector<Director2> dirs;
    for (int k = 0; k < M; ++k) dirs.push_back(Director2::from_angle(std::numbers::pi * k / M));
    auto tabulate = [&](auto fn) {
        std::vector<double> t(std::size_t(M) * M);
        for (int a = 0; a < M; ++a)
            for (int b = 0; b < M; ++b) t[std::size_t(a) * M + b] = fn(dirs[a], dirs[b]);
        return t;
    };
    auto neighbours = [&](const std::vector<std::array<int, 2>>& offs) {
        std::vector<std::vector<int>> n(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
            auto [i, j] = g.site(k);
            for (auto d : offs) {
                long o = g.index(i + d[0], j + d[1]);
                if (o >= 0) n[k].push_back(int(o));
            }
        }
        return n;
    };
    m.tables.push_back(tabulate([&](const Director2& u, const Director2& v) { return f(u, v); }));
    m.nbrs.push_back(neighbours({{1, 0}, {-1, 0}, {0, 1}, {0, -1}}));
    if (spec.bonds == BondSet::Competition) {
        m.tables.push_back(tabulate([](const Director2& u, const Director2& v) {
            double d = u.dot(v);
            return 1 - d * d;
        }));
        m.nbrs.push_back(neighbours({{1, 1}, {-1, -1}, {1, -1}, {-1, 1}}));
    }
    for (const auto& u : dirs) {
        QTensor2 q = q_of(u);
        m.feature.push_back({q.q1(), q.q2()});
    }
    m.target = {spec.target.q1(), spec.target.q2()};
    m.metric = {2.0, 2.0};
    m.rho = spec.rho;

    // seeds: uniform, checkerboard of the decomposition, twists with every grid step
    std::vector<Config> seeds;
    Decomposition2 dec = decompose2(spec.target);
    double tu = std::atan2(dec.u.y(), dec.u.x()), tv = std::atan2(dec.v.y(), dec.v.x());
    auto make = [&](auto angle) {
        Config c(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
            auto [i, j] = g.site(k);
            c[k] = angle(i, j);
        }
        return c;
    };
    seeds.push_back(make([&](int, int) { return snap(tu, M); }));
    seeds.push_back(make([&](int i, int j) { return snap((i + j) % 2 ? tv : tu, M); }));
    for (int d = 1; d < M; ++d) {
        int u0 = snap(tu, M);
        seeds.push_back(make([&](int i, int j) { return (u0 + (i + j) * d) % M; }));
        seeds.push_back(make([&](int i, int) { return (u0 + i * d) % M; }));
        seeds.push_back(make([&](int, int j) { return (u0 + j * d) % M; }));
    }

    bool exhaust = false;
    Best best = solve(m, spec.optimizer, spec.anneal, seeds, exhaust);
    std::vector<Director2> u;
    for (int s : best.config) u.push_back(dirs[std::size_t(s)]);
    DirectorField2 field(g, std::move(u));
    double e = energy(m, best.config);
    auto sum = feature_sum(m, best.config);
    double n = m.sites;
    QTensor2 mean = QTensor2::from_deviatoric(sum[0] / n, sum[1] / n);
    return {e / n, e, std::move(field), mean, distance(m, sum), exhaust, spec.anneal.seed};
}

std::vector<Director3> sphere_directions(int level) {
    if (level < 0) throw InvalidSpec("refinement level must be nonnegative");
    using V = std::array<double, 3>;
    const double t = (1 + std::sqrt(5.0)) / 2;
    std::vector<V> pts{{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                       {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    std::vector<std::array<int, 3>> faces{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                          {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                          {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                          {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    auto unit = [](V p) {
        double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        return V{p[0] / n, p[1] / n, p[2] / n};
    };
    for (auto& p : pts) p = unit(p);
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> mid;
        auto midpoint_of = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end()) return it->second;
            const V &p = pts[std::size_t(a)], &q = pts[std::size_t(b)];
            pts.push_back(unit({p[0] + q[0], p[1] + q[1], p[2] + q[2]}));
            int id = int(pts.size()) - 1;
            mid.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        for (auto [a, b, c] : faces) {
            int ab = midpoint_of(a, b), bc = midpoint_of(b, c), ca = midpoint_of(c, a);
            next.push_back({a, ab, ca});
            next.push_back({b, bc, ab});
            next.push_back({c, ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    std::vector<Director3> out;
    for (const auto& p : pts) {
        Director3 d = Director3(p[0], p[1], p[2]).canonical();
        bool dup = false;
        for (const auto& o : out)
            if (std::fabs(std::fabs(o.dot(d)) - 1) < 1e-12) dup = true;
        if (!dup) out.push_back(d);
    }
    return out;
}

namespace {

const std::vector<std::array<int, 3>>& offsets3(int norm2) {
    static const auto build = [](int n2) {
        std::vector<std::array<int, 3>> out;
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
                for (int c = -1; c <= 1; ++c)
                    if (a * a + b * b + c * c == n2) out.push_back({a, b, c});
        return out;
    };
    static const auto one = build(1), two = build(2);
    return norm2 == 1 ? one : two;
}

std::array<double, 6> sym_features(const Sym3& s) { return {s.xx, s.xy, s.xz, s.yy, s.yz, s.zz}; }

int pattern_colour(int a, int b, int c) { return 2 * ((a + c) & 1) + ((b + c) & 1); }

}  // namespace

CellProblemResult3 cell_problem_min(const CellProblemSpec3& spec, const Potential& f) {
    check_common(spec.rho, spec.window);
    check_anneal(spec.anneal);
    if (!f.isotropic) throw InvalidSpec("three-dimensional cell problems need an isotropic potential");
    const int h = spec.window;
    Grid3 g(h, h, h, 1.0);
    std::vector<Director3> dirs = sphere_directions(spec.level);
    const int M = int(dirs.size());

    Model m;
    m.sites = int(g.size());
    m.states = M;
    for (int cls : {1, 2}) {
        double w = cls == 1 ? 1.0 : 0.25;
        std::vector<double> t(std::size_t(M) * M);
        for (int a = 0; a < M; ++a)
            for (int b = 0; b < M; ++b) t[std::size_t(a) * M + b] = w * f(dirs[a], dirs[b]);
        m.tables.push_back(std::move(t));
        std::vector<std::vector<int>> n(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
            auto [i, j, l] = g.site(k);
            for (auto d : offsets3(cls))
                if (g.contains(i + d[0], j + d[1], l + d[2])) n[k].push_back(int(g.index(i + d[0], j + d[1], l + d[2])));
        }
        m.nbrs.push_back(std::move(n));
    }
    for (const auto& u : dirs) {
        auto s = sym_features(q_of(u).mat());
        m.feature.emplace_back(s.begin(), s.end());
    }
    auto tf = sym_features(spec.target.mat());
    m.target.assign(tf.begin(), tf.end());
    m.metric = {1, 2, 2, 1, 2, 1};
    m.rho = spec.rho;

    auto nearest = [&](const Director3& u) {
        int arg = 0;
        double bd = -1;
        for (int k = 0; k < M; ++k) {
            double d = std::fabs(dirs[k].dot(u));
            if (d > bd) bd = d, arg = k;
        }
        return arg;
    };
    std::vector<Config> seeds;
    Decomposition3 dec = decompose3(spec.target);
    std::array<int, 4> pat{nearest(dec.u), nearest(dec.v), nearest(dec.w), nearest(dec.z)};
    Config cell(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto [i, j, l] = g.site(k);
        cell[k] = pat[std::size_t(pattern_colour(i, j, l))];
    }
    seeds.push_back(cell);
    for (int k = 0; k < M; ++k) seeds.push_back(Config(g.size(), k));

    bool exhaust = false;
    Best best = solve(m, spec.optimizer, spec.anneal, seeds, exhaust);
    std::vector<Director3> u;
    for (int s : best.config) u.push_back(dirs[std::size_t(s)]);
    double e = energy(m, best.config);
    auto sum = feature_sum(m, best.config);
    double n = m.sites;
    Sym3 mean{sum[0] / n, sum[1] / n, sum[2] / n, sum[3] / n, sum[4] / n, sum[5] / n};
    return {e / n, e, DirectorField3(g, std::move(u)), mean, distance(m, sum), exhaust, spec.anneal.seed};
}

DirectorField2 checkerboard_recovery(const QTensor2& q, const Grid2& g) {
    Decomposition2 d = decompose2(q);
    std::vector<Director2> u;
    u.reserve(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto [i, j] = g.site(k);
        u.push_back(parity_of(i, j) == Parity::Even ? d.u : d.v);
    }
    return DirectorField2(g, std::move(u));
}

DirectorField2 oscillating_recovery(const Grid2& g, const std::function<double(const Point&)>& n_angle, double s) {
    if (!(s > 0 && s < 1)) throw InvalidSpec("well position s must lie in (0,1)");
    double alpha = 0.5 * std::acos(s);
    std::vector<Director2> u;
    u.reserve(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto [i, j] = g.site(k);
        double phi = n_angle(g.position(k));
        u.push_back(Director2::from_angle(parity_of(i, j) == Parity::Even ? phi + alpha : phi - alpha));
    }
    return DirectorField2(g, std::move(u));
}

bool faces_see_all_values(const DirectorField3& f, const std::array<Director3, 4>& pattern) {
    const Grid3& g = f.grid;
    auto same = [](const Director3& u, const Director3& p) { return u.x() == p.x() && u.y() == p.y() && u.z() == p.z(); };
    const std::array<std::array<int, 3>, 3> axes{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            const auto &e1 = axes[std::size_t(a)], &e2 = axes[std::size_t(b)];
            for (std::size_t k = 0; k < g.size(); ++k) {
                auto s = g.site(k);
                std::vector<std::size_t> corners;
                for (int x = 0; x < 2; ++x)
                    for (int y = 0; y < 2; ++y) {
                        int i = s[0] + x * e1[0] + y * e2[0], j = s[1] + x * e1[1] + y * e2[1],
                            l = s[2] + x * e1[2] + y * e2[2];
                        if (g.contains(i, j, l)) corners.push_back(g.index(i, j, l));
                    }
                if (corners.size() < 4) continue;
                // the four corners must be a permutation of the pattern
                std::array<bool, 4> used{};
                for (const auto& p : pattern) {
                    bool found = false;
                    for (std::size_t c = 0; c < 4 && !found; ++c)
                        if (!used[c] && same(f.u[corners[c]], p)) used[c] = found = true;
                    if (!found) return false;
                }
            }
        }
    return true;
}

Recovery3D recovery_3d(const std::array<Director3, 4>& pattern, const Potential& f, int window) {
    if (window < 2) throw InvalidSpec("window must be at least 2");
    if (!f.isotropic) throw InvalidSpec("three-dimensional recovery needs an isotropic potential");
    Grid3 g(window, window, window, 1.0 / window);
    std::vector<Director3> u;
    u.reserve(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto [i, j, l] = g.site(k);
        u.push_back(pattern[std::size_t(pattern_colour(i, j, l))]);
    }
    DirectorField3 field(g, std::move(u));
    if (!faces_see_all_values(field, pattern)) throw InternalConsistency("periodic cell misses a value on some face");

    Accumulator interior;
    std::size_t count = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto [i, j, l] = g.site(k);
        if (i == 0 || j == 0 || l == 0 || i == window - 1 || j == window - 1 || l == window - 1) continue;
        Accumulator e;
        for (auto d : offsets3(1)) e.add(f(field.u[k], field.u[g.index(i + d[0], j + d[1], l + d[2])]));
        for (auto d : offsets3(2)) e.add(0.25 * f(field.u[k], field.u[g.index(i + d[0], j + d[1], l + d[2])]));
        interior.add(e.value());
        ++count;
    }
    EnergySpec spec{f, BondSet::NN3DQuarterNNN, Scaling::Bulk, {}};
    double total = bulk_energy(spec, field).total;
    double boundary = total / (double(g.size()) * std::pow(g.eps, 3));
    Recovery3D r{std::move(field), pattern, count ? interior.value() / double(count) : boundary, boundary,
                 pairwise_sum(f, pattern)};
    return r;
}

Recovery3D recovery_3d(const QTensor3& q, const Potential& f, int window, const Fhat3DOptions& opt) {
    Fhat3DResult cert = fhat_3d(f, q, opt);
    return recovery_3d(cert.certificate, f, window);
}

}  // namespace nemlat
