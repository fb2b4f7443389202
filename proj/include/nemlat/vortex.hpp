#pragma once

#include <array>
#include <functional>
#include <vector>

#include "nemlat/lattice.hpp"

namespace nemlat {

using Vec2 = std::array<double, 2>;

// A(Q) = (2 Q11 - 1, 2 Q12) at every site, on the full-lattice triangulation
struct AuxField {
    Mesh mesh;
    std::vector<Vec2> a;
    Grid2 grid;

    // [component][direction]
    std::array<Vec2, 2> gradient(std::size_t t) const;
    double gradient_norm2(std::size_t t) const;
    Vec2 value_at(std::size_t t, const Point& x) const;
    // triangle of the variant A mesh containing x, -1 outside
    long locate(const Point& x) const;
};

Vec2 aux_value(const QTensor2& q);
AuxField aux_map(const PCQField& f);
AuxField aux_map(const DirectorField2& f);

struct JacobianField {
    std::vector<double> det, area;
    std::vector<Point> centroid;
    double total() const;
};

JacobianField jacobian_density(const AuxField& a);
// det x area over triangles with centroid in the closed ball
double ball_mass(const JacobianField& j, const Point& center, double r);

struct Winding {
    int degree;
    double raw;       // total angle / 2 pi
    double residual;  // |raw - degree|
};

// loop sampled on the affine interpolant; throws DegenerateLoop near cores
Winding winding_number(const AuxField& a, const Point& center, double r);

struct Defect {
    Point center;
    int charge;  // degree of A; the director turns by charge * pi
};

// plaquette centre next to the origin
Point default_center(const Grid2& g);
DirectorField2 half_vortex_field(const Grid2& g, const Point& center, int sign = 1);
DirectorField2 vortex_field(const Grid2& g, const std::vector<Defect>& defects);

struct ConcentrationFit {
    double slope, intercept, residual;  // residual: root mean square
    std::vector<double> eps, energy;
};

// least squares of the unscaled nearest-neighbour sum against |log eps|
ConcentrationFit concentration_fit(const std::vector<double>& eps_list,
                                   const std::function<DirectorField2(double)>& build);

}  // namespace nemlat
