#include "nemlat/potential.hpp"

#include <algorithm>
#include <cmath>

#include "nemlat/errors.hpp"

namespace nemlat {

SampledFunction1D::SampledFunction1D(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.size() < 2) throw InvalidSampling("need at least two nodes");
    if (grid_.size() != values_.size()) throw InvalidSampling("grid and values differ in length");
    if (grid_.front() != 0.0 || grid_.back() != 1.0) throw InvalidSampling("grid must run from 0 to 1");
    for (std::size_t k = 1; k < grid_.size(); ++k)
        if (!(grid_[k] > grid_[k - 1])) throw InvalidSampling("grid not strictly increasing");
    for (double v : values_)
        if (!std::isfinite(v)) throw InvalidSampling("non-finite value");
}

SampledFunction1D SampledFunction1D::uniform(int nodes, const std::function<double(double)>& fn) {
    if (nodes < 2) throw InvalidSampling("need at least two nodes");
    std::vector<double> g(nodes), v(nodes);
    for (int k = 0; k < nodes; ++k) {
        g[k] = k == nodes - 1 ? 1.0 : double(k) / (nodes - 1);
        v[k] = fn(g[k]);
    }
    return SampledFunction1D(std::move(g), std::move(v));
}

double SampledFunction1D::operator()(double t) const {
    t = std::clamp(t, 0.0, 1.0);
    auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    if (it == grid_.end()) return values_.back();
    std::size_t k = std::size_t(it - grid_.begin());
    if (k == 0) return values_.front();
    double t0 = grid_[k - 1], t1 = grid_[k];
    double w = (t - t0) / (t1 - t0);
    return (1 - w) * values_[k - 1] + w * values_[k];
}

double SampledFunction1D::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

double Potential::profile(double x) const {
    if (!isotropic) throw InvalidSpec("potential " + name + " has no scalar profile");
    return h(std::min(std::fabs(x), 1.0));
}

double Potential::operator()(const Director2& u, const Director2& v) const {
    if (isotropic) return h(std::min(std::fabs(u.dot(v)), 1.0));
    Director2 a = u.canonical(), b = v.canonical();
    return 0.5 * (raw2(a, b) + raw2(b, a));
}

double Potential::operator()(const Director3& u, const Director3& v) const {
    if (isotropic) return h(std::min(std::fabs(u.dot(v)), 1.0));
    throw InvalidSpec("potential " + name + " is only defined in the plane");
}

namespace {

Potential isotropic(std::string name, std::map<std::string, double> params, std::function<double(double)> h,
                    double inf) {
    Potential p;
    p.name = std::move(name);
    p.params = std::move(params);
    p.isotropic = true;
    p.h = std::move(h);
    p.inf_value = inf;
    return p;
}

double require(const std::map<std::string, double>& params, const std::string& key, const std::string& who) {
    auto it = params.find(key);
    if (it == params.end()) throw InvalidSpec(who + " needs parameter " + key);
    return it->second;
}

}  // namespace

Potential lebwohl_lasher() {
    return isotropic("lebwohl-lasher", {}, [](double x) { return -x * x; }, -1.0);
}

Potential power_potential(double p) {
    if (!(p > 0)) throw InvalidSpec("power exponent must be positive");
    return isotropic("power", {{"p", p}}, [p](double x) { return -std::pow(x, p); }, -1.0);
}

Potential quartic_well(double s) {
    if (!(s >= 0 && s <= 1)) throw InvalidSpec("well position must lie in [0,1]");
    return isotropic(
        "quartic-well", {{"s", s}},
        [s](double x) {
            double d = x * x - s * s;
            return d * d;
        },
        0.0);
}

Potential octic_well(double s) {
    if (!(s >= 0 && s <= 1)) throw InvalidSpec("well position must lie in [0,1]");
    return isotropic(
        "octic-well", {{"s", s}},
        [s](double x) {
            double d = x * x - s * s;
            return d * d * d * d;
        },
        0.0);
}

Potential one_minus() {
    return isotropic(
        "one-minus", {},
        [](double x) {
            double d = 1 - x;
            return d * d;
        },
        0.0);
}

std::array<std::array<double, 2>, 4> noradial_points(double l, double m) {
    double tl = std::acos(l), tm = std::acos(m);
    // q = (e^{2ia} + e^{2ib}) / 4 for Q = (a(x)a + b(x)b) / 2
    auto pt = [](double a, double b) {
        return std::array<double, 2>{0.25 * (std::cos(2 * a) + std::cos(2 * b)),
                                     0.25 * (std::sin(2 * a) + std::sin(2 * b))};
    };
    double pi = std::acos(-1.0);
    return {pt(tl, tl + tm), pt(tl, tl - tm), pt(pi - tl, pi - tl + tm), pt(pi - tl, pi - tl - tm)};
}

Potential example_noradial(double l, double m) {
    if (!(l > 0 && l < 1 && m > 0 && m < 1)) throw InvalidSpec("example-noradial needs l, m in (0,1)");
    constexpr double tol = 1e-8;
    auto ft = [l, m](const Director2& u, const Director2& v) {
        return (std::fabs(std::fabs(u.x()) - l) <= tol && std::fabs(std::fabs(u.dot(v)) - m) <= tol) ? 0.0 : 1.0;
    };
    Potential p;
    p.name = "example-noradial";
    p.params = {{"l", l}, {"m", m}};
    p.isotropic = false;
    p.raw2 = [ft](const Director2& u, const Director2& v) { return std::min(ft(u, v), ft(v, u)); };
    p.inf_value = 0.0;
    for (const auto& q : noradial_points(l, m)) p.marked_points.push_back(q);
    return p;
}

Potential sampled_potential(const SampledFunction1D& h) {
    return isotropic("sampled", {}, [h](double x) { return h(x); }, h.min_value());
}

Potential general_potential(const std::string& name, std::function<double(const Director2&, const Director2&)> f,
                            double inf_value) {
    Potential p;
    p.name = name;
    p.isotropic = false;
    p.raw2 = std::move(f);
    p.inf_value = inf_value;
    return p;
}

std::vector<std::string> potential_names() {
    return {"lebwohl-lasher", "power", "quartic-well", "octic-well", "one-minus", "example-noradial"};
}

Potential named_potential(const std::string& name, const std::map<std::string, double>& params) {
    auto allow = [&](std::initializer_list<const char*> keys) {
        for (const auto& [k, v] : params) {
            bool ok = false;
            for (const char* a : keys) ok = ok || k == a;
            if (!ok) throw InvalidSpec("potential " + name + " takes no parameter " + k);
        }
    };
    if (name == "lebwohl-lasher") {
        allow({});
        return lebwohl_lasher();
    }
    if (name == "power") {
        allow({"p"});
        return power_potential(require(params, "p", name));
    }
    if (name == "quartic-well") {
        allow({"s"});
        return quartic_well(require(params, "s", name));
    }
    if (name == "octic-well") {
        allow({"s"});
        return octic_well(require(params, "s", name));
    }
    if (name == "one-minus") {
        allow({});
        return one_minus();
    }
    if (name == "example-noradial") {
        allow({"l", "m"});
        return example_noradial(require(params, "l", name), require(params, "m", name));
    }
    throw InvalidSpec("unknown potential " + name);
}

}  // namespace nemlat
