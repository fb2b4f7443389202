#include "nemlat/energy.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "nemlat/envelope.hpp"
#include "nemlat/errors.hpp"
#include "nemlat/summation.hpp"

namespace nemlat {

namespace {

using Offset2 = std::array<int, 2>;
using Offset3 = std::array<int, 3>;

const std::vector<Offset2> kNN2{{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
const std::vector<Offset2> kNNN2{{1, 1}, {-1, -1}, {1, -1}, {-1, 1}};

std::vector<Offset3> offsets3(int norm2) {
    std::vector<Offset3> out;
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
            for (int c = -1; c <= 1; ++c)
                if (a * a + b * b + c * c == norm2) out.push_back({a, b, c});
    return out;
}

template <class Pair>
BondClass sum_bonds(const DirectorField2& f, const std::vector<Offset2>& offs, const std::string& name, Pair pair) {
    const Grid2& g = f.grid;
    Accumulator acc;
    std::size_t n = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto [i, j] = g.site(k);
        for (const auto& d : offs) {
            long m = g.index(i + d[0], j + d[1]);
            if (m < 0) continue;
            acc.add(pair(f.u[k], f.u[std::size_t(m)]));
            ++n;
        }
    }
    return {name, acc.value(), n};
}

template <class Pair>
BondClass sum_bonds(const DirectorField3& f, const std::vector<Offset3>& offs, const std::string& name, Pair pair) {
    const Grid3& g = f.grid;
    Accumulator acc;
    std::size_t n = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto [i, j, l] = g.site(k);
        for (const auto& d : offs) {
            if (!g.contains(i + d[0], j + d[1], l + d[2])) continue;
            acc.add(pair(f.u[k], f.u[g.index(i + d[0], j + d[1], l + d[2])]));
            ++n;
        }
    }
    return {name, acc.value(), n};
}

double maier_saupe(const Director2& u, const Director2& v) {
    double d = u.dot(v);
    return 1 - d * d;
}

template <class Pair>
std::vector<BondClass> classes2(const EnergySpec& spec, const DirectorField2& f, Pair pair) {
    switch (spec.bonds) {
        case BondSet::NN2D:
            return {sum_bonds(f, kNN2, "nn", pair)};
        case BondSet::Competition:
            return {sum_bonds(f, kNN2, "nn", pair), sum_bonds(f, kNNN2, "nnn", maier_saupe)};
        case BondSet::LongRange: {
            validate_coefficients(spec.coefficients);
            Accumulator acc;
            std::size_t n = 0;
            for (const auto& c : spec.coefficients) {
                BondClass b = sum_bonds(f, {c.xi}, "", pair);
                acc.add(c.c * b.sum);
                n += b.bonds;
            }
            return {{"long-range", acc.value(), n}};
        }
        case BondSet::NN3DQuarterNNN:
            break;
    }
    throw InvalidSpec("bond set needs a three-dimensional field");
}

void finish(EnergyBreakdown& e) {
    Accumulator acc;
    for (const auto& c : e.classes) acc.add(c.sum);
    e.total = acc.value();
}

double clamp_small(double x) { return (x < 0 && x > -1e-12) ? 0.0 : x; }

}  // namespace

EnergyBreakdown bulk_energy(const EnergySpec& spec, const DirectorField2& field) {
    const Potential& f = spec.potential;
    double w = field.grid.eps() * field.grid.eps();
    EnergyBreakdown e;
    e.classes = classes2(spec, field, [&](const Director2& u, const Director2& v) { return f(u, v); });
    for (auto& c : e.classes) c.sum *= w;
    finish(e);
    return e;
}

EnergyBreakdown bulk_energy(const EnergySpec& spec, const DirectorField3& field) {
    if (spec.bonds != BondSet::NN3DQuarterNNN) throw InvalidSpec("bond set needs a two-dimensional field");
    const Potential& f = spec.potential;
    if (!f.isotropic) throw InvalidSpec("three-dimensional energies need an isotropic potential");
    double w = std::pow(field.grid.eps, 3);
    auto pair = [&](const Director3& u, const Director3& v) { return f(u, v); };
    EnergyBreakdown e;
    e.classes = {sum_bonds(field, offsets3(1), "nn", pair), sum_bonds(field, offsets3(2), "nnn", pair)};
    e.classes[0].sum *= w;
    e.classes[1].sum *= 0.25 * w;
    finish(e);
    return e;
}

double first_order_energy(const EnergySpec& spec, const DirectorField2& field) {
    const Potential& f = spec.potential;
    auto cls = classes2(spec, field, [&](const Director2& u, const Director2& v) { return clamp_small(f(u, v) - f.inf_value); });
    Accumulator acc;
    for (const auto& c : cls) acc.add(c.sum);
    return acc.value();
}

double first_order_energy(const EnergySpec& spec, const DirectorField3& field) {
    if (spec.bonds != BondSet::NN3DQuarterNNN) throw InvalidSpec("bond set needs a two-dimensional field");
    const Potential& f = spec.potential;
    auto pair = [&](const Director3& u, const Director3& v) { return clamp_small(f(u, v) - f.inf_value); };
    Accumulator acc;
    acc.add(sum_bonds(field, offsets3(1), "nn", pair).sum);
    acc.add(0.25 * sum_bonds(field, offsets3(2), "nnn", pair).sum);
    return acc.value();
}

double nn_defect_sum(const DirectorField2& field) { return sum_bonds(field, kNN2, "nn", maier_saupe).sum; }

double concentration_energy(const DirectorField2& field) {
    double eps = field.grid.eps();
    if (!(eps < 1)) throw InvalidScaling("logarithmic scaling needs eps < 1");
    return nn_defect_sum(field) / std::fabs(std::log(eps));
}

DualBound dual_lower_bound(const DirectorField2& field, const Potential& f) {
    if (!f.isotropic) throw InvalidSpec("dual bound needs an isotropic potential");
    EnergySpec spec{f, BondSet::NN2D, Scaling::Bulk, {}};
    double lhs = bulk_energy(spec, field).total;
    DualQField dual = dual_interpolate(pc_field(field));
    Accumulator acc;
    for (const auto& n : dual.nodes) acc.add(fhat_radial(f, n.q));
    double e2 = field.grid.eps() * field.grid.eps();
    return {lhs, 2 * e2 * acc.value()};
}

std::vector<HedgehogRow> hedgehog_counterexample(const std::vector<double>& eps_list) {
    std::vector<HedgehogRow> rows;
    for (double eps : eps_list) {
        Grid2 g = build_grid(Rect{-1, -1, 1, 1}, eps);
        DirectorField2 f = field_from_angle(g, [](const Point& x) {
            if (x[0] == 0 && x[1] == 0) return 0.0;
            return std::atan2(x[1], x[0]);
        });
        double value = sum_bonds(f, kNN2, "nn", [](const Director2& u, const Director2& v) {
                           double d = 1 - std::fabs(u.dot(v));
                           return d * d;
                       }).sum;
        rows.push_back({eps, value, nn_defect_sum(f)});
    }
    return rows;
}

double hedgehog_bound() { return 8 + std::pow(std::numbers::sqrt2 + 1, 4) / 2; }

void validate_coefficients(const std::vector<LongRangeCoefficient>& c) {
    std::map<std::array<int, 2>, double> table;
    for (const auto& e : c) {
        if (e.xi[0] == 0 && e.xi[1] == 0) throw InvalidSpec("zero interaction vector");
        if (!std::isfinite(e.c)) throw InvalidSpec("non-finite coefficient");
        if (!table.emplace(e.xi, e.c).second) throw InvalidSpec("repeated interaction vector");
    }
    for (const auto& [xi, v] : table) {
        auto it = table.find({-xi[1], xi[0]});
        double w = it == table.end() ? 0.0 : it->second;
        if (std::fabs(w - v) > 1e-12 * std::max(1.0, std::fabs(v)))
            throw InvalidSpec("coefficients not invariant under quarter turns");
    }
}

double long_range_prefactor(const std::vector<LongRangeCoefficient>& c) {
    validate_coefficients(c);
    Accumulator acc;
    for (const auto& e : c) acc.add(double(e.xi[0] * e.xi[0] + e.xi[1] * e.xi[1]) * e.c);
    return std::numbers::pi * acc.value();
}

std::vector<LongRangeCoefficient> power_law_coefficients(double R) {
    std::vector<LongRangeCoefficient> out;
    int r = int(std::floor(R));
    for (int a = -r; a <= r; ++a)
        for (int b = -r; b <= r; ++b) {
            int n2 = a * a + b * b;
            if (n2 == 0 || n2 > R * R) continue;
            out.push_back({{a, b}, std::pow(double(n2), -3)});
        }
    return out;
}

}  // namespace nemlat
