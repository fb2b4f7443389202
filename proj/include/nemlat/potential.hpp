#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nemlat/qtensor.hpp"

namespace nemlat {

class SampledFunction1D {
public:
    SampledFunction1D(std::vector<double> grid, std::vector<double> values);
    static SampledFunction1D uniform(int nodes, const std::function<double(double)>& fn);

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return grid_.size(); }
    // piecewise-linear, clamped to [0,1]
    double operator()(double t) const;
    double min_value() const;

private:
    std::vector<double> grid_, values_;
};

// pair interaction f(u,v); isotropic ones are h(|u.v|)
struct Potential {
    std::string name;
    std::map<std::string, double> params;
    bool isotropic = true;
    std::function<double(double)> h;
    std::function<double(const Director2&, const Director2&)> raw2;
    double inf_value = 0.0;
    // deviatoric points (q1,q2) where the relaxed density is known to be minimal
    std::vector<std::array<double, 2>> marked_points;

    double profile(double x) const;
    double operator()(const Director2& u, const Director2& v) const;
    double operator()(const Director3& u, const Director3& v) const;
};

Potential lebwohl_lasher();
Potential power_potential(double p);
Potential quartic_well(double s);
Potential octic_well(double s);
Potential one_minus();
Potential example_noradial(double l, double m);
Potential sampled_potential(const SampledFunction1D& h);
Potential general_potential(const std::string& name, std::function<double(const Director2&, const Director2&)> f,
                            double inf_value);

// names: lebwohl-lasher, power(p), quartic-well(s), octic-well(s), one-minus, example-noradial(l,m)
Potential named_potential(const std::string& name, const std::map<std::string, double>& params = {});
std::vector<std::string> potential_names();

// the four matrices of the non-radial example, deviatoric coordinates
std::array<std::array<double, 2>, 4> noradial_points(double l, double m);

}  // namespace nemlat
