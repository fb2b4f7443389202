#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nemlat/errors.hpp"
#include "nemlat/homogenize.hpp"

using namespace nemlat;

namespace {

const double kPi = std::numbers::pi;

CellProblemSpec2 small_spec(const QTensor2& q, double rho, int window, int M, Optimizer opt) {
    CellProblemSpec2 s;
    s.target = q;
    s.rho = rho;
    s.window = window;
    s.M = M;
    s.optimizer = opt;
    s.anneal.steps_per_site = 100;
    return s;
}

}  // namespace

TEST_CASE("unconstrained Lebwohl-Lasher cell is uniform") {
    for (int h : {2, 4, 6}) {
        auto s = small_spec(QTensor2::from_deviatoric(0.1, -0.05), std::numbers::sqrt2, h, 8, Optimizer::Anneal);
        auto r = cell_problem_min(s, lebwohl_lasher());
        CHECK(r.value_per_volume == doctest::Approx(-4.0 * (h - 1) / h).epsilon(1e-12));
        CHECK(r.distance <= s.rho + 1e-9);
    }
}

TEST_CASE("exhaustive and annealed minima agree on tiny windows") {
    auto ex = cell_problem_min(small_spec(QTensor2::half_identity(), 0.05, 2, 4, Optimizer::Exhaustive), lebwohl_lasher());
    CHECK(ex.exhaustive);
    auto an = cell_problem_min(small_spec(QTensor2::half_identity(), 0.05, 2, 4, Optimizer::Anneal), lebwohl_lasher());
    CHECK_FALSE(an.exhaustive);
    CHECK(an.value_per_volume == doctest::Approx(ex.value_per_volume).epsilon(1e-12));
    auto au = cell_problem_min(small_spec(QTensor2::half_identity(), 0.05, 2, 4, Optimizer::Auto), lebwohl_lasher());
    CHECK(au.exhaustive);

    // brute force over the 4^4 configurations by hand
    double brute = 1e9;
    for (int c = 0; c < 256; ++c) {
        int a[4] = {c & 3, (c >> 2) & 3, (c >> 4) & 3, (c >> 6) & 3};
        double q1 = 0, q2 = 0, e = 0;
        for (int k = 0; k < 4; ++k) {
            q1 += 0.25 * 0.5 * std::cos(2 * kPi * a[k] / 4);
            q2 += 0.25 * 0.5 * std::sin(2 * kPi * a[k] / 4);
        }
        if (std::sqrt(2 * (q1 * q1 + q2 * q2)) > 0.05 + 1e-9) continue;
        // sites 0,1 / 2,3 in rows: bonds 0-1, 2-3, 0-2, 1-3, both orders
        int bonds[4][2] = {{0, 1}, {2, 3}, {0, 2}, {1, 3}};
        for (auto& b : bonds) {
            double d = std::cos(kPi * (a[b[0]] - a[b[1]]) / 4);
            e += -2 * d * d;
        }
        brute = std::min(brute, e / 4);
    }
    CHECK(ex.value_per_volume == doctest::Approx(brute).epsilon(1e-12));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-0.2, 0.2);
    for (int t = 0; t < 4; ++t) {
        QTensor2 q = QTensor2::from_deviatoric(U(rng), U(rng));
        for (const auto& f : {quartic_well(0.5), lebwohl_lasher()})
            for (BondSet b : {BondSet::NN2D, BondSet::Competition}) {
                auto s = small_spec(q, 0.15, 3, 4, Optimizer::Exhaustive);
                s.bonds = b;
                auto e = cell_problem_min(s, f);
                s.optimizer = Optimizer::Anneal;
                auto a = cell_problem_min(s, f);
                CHECK(a.value_per_volume >= e.value_per_volume - 1e-12);
                CHECK(a.distance <= s.rho + 1e-9);
            }
    }
}

TEST_CASE("quartic well cell problem reaches the well") {
    auto f = quartic_well(0.5);
    for (const QTensor2& q : {QTensor2::half_identity(), QTensor2::from_deviatoric(0.125, 0.0),
                              QTensor2::from_deviatoric(0.15, 0.2)}) {
        CellProblemSpec2 s;
        s.target = q;
        auto r = cell_problem_min(s, f);
        CHECK(r.value_per_volume < 0.05);
        CHECK(r.value_per_volume >= 0);
        CHECK(r.distance <= 0.05 + 1e-9);
        CHECK(frobenius2(r.mean.mat() - q.mat()) <= std::pow(0.05 + 1e-9, 2));
    }
    // outside K_s: Jensen on the dual nodes bounds the value from below
    CellProblemSpec2 s;
    s.target = QTensor2::from_deviatoric(0.4, 0);
    s.window = 6;
    auto r = cell_problem_min(s, f);
    auto dual = dual_interpolate(pc_field(r.best));
    double m1 = 0, m2 = 0;
    for (const auto& n : dual.nodes) m1 += n.q.q1() / double(dual.nodes.size()), m2 += n.q.q2() / double(dual.nodes.size());
    double t = 2 * std::hypot(m1, m2);
    double hpp = t <= 0.5 ? 0.0 : (t * t - 0.25) * (t * t - 0.25);
    CHECK(t > 0.5);
    CHECK(r.value_per_volume >= 2 * double(dual.nodes.size()) * hpp / 36 - 1e-12);
}

TEST_CASE("cell problem errors") {
    auto f = lebwohl_lasher();
    CHECK_THROWS_AS(cell_problem_min(small_spec(QTensor2::half_identity(), 0.0, 4, 8, Optimizer::Auto), f), InvalidSpec);
    CHECK_THROWS_AS(cell_problem_min(small_spec(QTensor2::half_identity(), 1.5, 4, 8, Optimizer::Auto), f), InvalidSpec);
    CHECK_THROWS_AS(cell_problem_min(small_spec(QTensor2::half_identity(), 0.1, 1, 8, Optimizer::Auto), f), InvalidSpec);
    CHECK_THROWS_AS(cell_problem_min(small_spec(QTensor2::half_identity(), 0.1, 4, 3, Optimizer::Auto), f), InvalidSpec);
    CHECK_THROWS_AS(cell_problem_min(small_spec(QTensor2::half_identity(), 0.1, 8, 64, Optimizer::Exhaustive), f),
                    InvalidSpec);
    auto lr = small_spec(QTensor2::half_identity(), 0.1, 4, 8, Optimizer::Auto);
    lr.bonds = BondSet::LongRange;
    CHECK_THROWS_AS(cell_problem_min(lr, f), InvalidSpec);

    // means of four sites on the 4-angle grid miss this target by about 0.149
    QTensor2 q = q_of(Director2::from_angle(10 * kPi / 180));
    for (Optimizer o : {Optimizer::Exhaustive, Optimizer::Anneal}) {
        try {
            cell_problem_min(small_spec(q, 0.01, 2, 4, o), f);
            FAIL("expected infeasibility");
        } catch (const Infeasible& e) {
            CHECK(e.best_residual == doctest::Approx(0.1491 - 0.01).epsilon(0.01));
        }
    }
}

TEST_CASE("checkerboard recovery") {
    Grid2 g = build_grid(Rect{0, 0, 1, 1}, 1.0 / 16);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(0, 1);
    for (int t = 0; t < 20; ++t) {
        double r = 0.5 * std::sqrt(U(rng)), a = 2 * kPi * U(rng);
        QTensor2 q = QTensor2::from_deviatoric(r * std::cos(a), r * std::sin(a));
        auto dual = dual_interpolate(pc_field(checkerboard_recovery(q, g)));
        for (const auto& n : dual.nodes) CHECK(std::sqrt(frobenius2(n.q.mat() - q.mat())) < 1e-12);
    }
    auto ll = EnergySpec{lebwohl_lasher(), BondSet::NN2D, Scaling::Bulk, {}};
    auto half = checkerboard_recovery(QTensor2::half_identity(), g);
    CHECK(std::fabs(bulk_energy(ll, half).total) < 1e-14);
    auto uni = checkerboard_recovery(q_of(Director2::from_angle(0.3)), g);
    for (const auto& u : uni.u) CHECK(std::fabs(std::fabs(u.dot(Director2::from_angle(0.3))) - 1) < 1e-12);
    CHECK(bulk_energy(ll, uni).total == doctest::Approx(-4.0 * 17 / 16).epsilon(1e-12));

    for (double s : {0.25, 0.5, std::sqrt(0.5)}) {
        QTensor2 q = QTensor2::from_deviatoric(0.5 * s * std::cos(0.7), 0.5 * s * std::sin(0.7));
        auto cb = checkerboard_recovery(q, g);
        EnergySpec spec{quartic_well(s), BondSet::NN2D, Scaling::FirstOrder, {}};
        CHECK(first_order_energy(spec, cb) < 1e-12);
        spec.bonds = BondSet::Competition;
        CHECK(first_order_energy(spec, cb) < 1e-12);
    }
    CHECK_THROWS_AS(checkerboard_recovery(QTensor2(1.2, 0.0, -0.2), g), InvalidQTensor);
}

TEST_CASE("oscillating recovery") {
    Grid2 g = build_grid(Rect{0, 0, 1, 1}, 1.0 / 16);
    for (double s : {0.5, std::sqrt(0.5)}) {
        auto f = oscillating_recovery(g, [](const Point&) { return 0.4; }, s);
        auto dual = dual_interpolate(pc_field(f));
        QTensor2 q = QTensor2::from_deviatoric(0.5 * s * std::cos(0.8), 0.5 * s * std::sin(0.8));
        for (const auto& n : dual.nodes) CHECK(std::sqrt(frobenius2(n.q.mat() - q.mat())) < 1e-12);
        EnergySpec spec{quartic_well(s), BondSet::Competition, Scaling::FirstOrder, {}};
        CHECK(first_order_energy(spec, f) < 1e-12);
    }
    CHECK_THROWS_AS(oscillating_recovery(g, [](const Point&) { return 0.0; }, 1.0), InvalidSpec);
}

TEST_CASE("sphere directions") {
    CHECK(sphere_directions(0).size() == 6);
    CHECK(sphere_directions(1).size() == 21);
    CHECK(sphere_directions(2).size() == 81);
    auto d = sphere_directions(2);
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j) CHECK(std::fabs(d[i].dot(d[j])) < 1 - 1e-6);
    CHECK_THROWS_AS(sphere_directions(-1), InvalidSpec);
}

TEST_CASE("three-dimensional cell problem") {
    CellProblemSpec3 s;
    s.rho = std::numbers::sqrt2;
    s.window = 2;
    s.level = 0;
    s.optimizer = Optimizer::Exhaustive;
    auto ex = cell_problem_min(s, lebwohl_lasher());
    // 24 ordered axis bonds and 24 ordered face diagonals of weight 1/4 on 8 sites
    CHECK(ex.value_per_volume == doctest::Approx(-30.0 / 8).epsilon(1e-12));
    s.optimizer = Optimizer::Anneal;
    s.anneal.steps_per_site = 50;
    auto an = cell_problem_min(s, lebwohl_lasher());
    CHECK(an.value_per_volume == doctest::Approx(ex.value_per_volume).epsilon(1e-12));

    s.rho = 0.4;
    s.optimizer = Optimizer::Exhaustive;
    auto ec = cell_problem_min(s, lebwohl_lasher());
    s.optimizer = Optimizer::Anneal;
    auto ac = cell_problem_min(s, lebwohl_lasher());
    CHECK(ac.value_per_volume >= ec.value_per_volume - 1e-12);
    CHECK(ec.distance <= 0.4 + 1e-9);
    CHECK(ec.value_per_volume > ex.value_per_volume);
    CHECK_THROWS_AS(cell_problem_min(s, example_noradial(0.6, 0.8)), InvalidSpec);
}

TEST_CASE("three-dimensional recovery") {
    Director3 e(0, 0.6, 0.8);
    auto uni = recovery_3d(std::array<Director3, 4>{e, e, e, e}, lebwohl_lasher(), 6);
    CHECK(uni.density == doctest::Approx(-9.0).epsilon(1e-13));
    CHECK(uni.target() == doctest::Approx(-9.0).epsilon(1e-13));

    auto r8 = recovery_3d(QTensor3::third_identity(), lebwohl_lasher(), 8);
    CHECK(std::fabs(r8.density - r8.target()) <= 0.03 * std::fabs(r8.target()));
    CHECK(faces_see_all_values(r8.field, r8.pattern));
    auto r4 = recovery_3d(r8.pattern, lebwohl_lasher(), 4);
    CHECK(faces_see_all_values(r4.field, r4.pattern));
    double prev = 1e9;
    for (int w : {4, 8, 16}) {
        auto r = recovery_3d(r8.pattern, lebwohl_lasher(), w);
        double err = std::fabs(r.boundary_density - r.target());
        CHECK(err < prev);
        CHECK(err * w < 30);
        prev = err;
    }
    // breaking the tiling is detected
    auto broken = r4.field;
    broken.u[5] = r4.pattern[0];
    broken.u[4] = r4.pattern[0];
    CHECK_FALSE(faces_see_all_values(broken, r4.pattern));
}
