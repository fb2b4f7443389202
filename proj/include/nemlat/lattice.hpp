#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "nemlat/geometry.hpp"
#include "nemlat/qtensor.hpp"

namespace nemlat {

// sites i with eps*i in the closed rectangle, enumerated row-major (i1 fastest)
class Grid2 {
public:
    Grid2(const Rect& domain, double eps);

    const Rect& domain() const { return domain_; }
    double eps() const { return eps_; }
    int i_min() const { return i0_; }
    int i_max() const { return i1_; }
    int j_min() const { return j0_; }
    int j_max() const { return j1_; }
    int nx() const { return i1_ - i0_ + 1; }
    int ny() const { return j1_ - j0_ + 1; }
    std::size_t size() const { return std::size_t(nx()) * std::size_t(ny()); }
    bool contains(int i, int j) const { return i >= i0_ && i <= i1_ && j >= j0_ && j <= j1_; }
    // -1 when (i,j) is not a site
    long index(int i, int j) const {
        return contains(i, j) ? long(j - j0_) * nx() + (i - i0_) : -1;
    }
    std::array<int, 2> site(std::size_t k) const { return {i0_ + int(k % nx()), j0_ + int(k / nx())}; }
    Point position(int i, int j) const { return {eps_ * i, eps_ * j}; }
    Point position(std::size_t k) const {
        auto s = site(k);
        return position(s[0], s[1]);
    }
    // rectangle spanned by the sites
    Rect hull() const { return {eps_ * i0_, eps_ * j0_, eps_ * i1_, eps_ * j1_}; }
    bool same_as(const Grid2& o) const;

private:
    Rect domain_;
    double eps_;
    int i0_, i1_, j0_, j1_;
};

Grid2 build_grid(const Rect& domain, double eps);

struct DirectorField2 {
    Grid2 grid;
    std::vector<Director2> u;
    DirectorField2(const Grid2& g, std::vector<Director2> values);
};

DirectorField2 field_from_angle(const Grid2& g, const std::function<double(const Point&)>& theta);
DirectorField2 field_from_angles(const Grid2& g, const std::vector<double>& theta);

struct PCQField {
    Grid2 grid;
    std::vector<QTensor2> q;
    PCQField(const Grid2& g, std::vector<QTensor2> values);
};

PCQField pc_field(const DirectorField2& f);

struct DualNode {
    Point position;
    std::size_t a, b;  // generating bond
    QTensor2 q;
};

struct DualQField {
    Grid2 grid;
    std::vector<DualNode> nodes;
};

DualQField dual_interpolate(const PCQField& f);

// area averages over a subrectangle, cells clipped to the rectangle
Sym2 pc_average(const PCQField& f, const Rect& r);
Sym2 dual_average(const DualQField& f, const Rect& r);

enum class Parity { Even = 0, Odd = 1 };

inline Parity parity_of(int i, int j) { return ((i + j) % 2 + 2) % 2 == 0 ? Parity::Even : Parity::Odd; }

struct Mesh {
    std::vector<Point> points;
    std::vector<std::array<std::size_t, 3>> tris;
};

// variant A: squares cut along the diagonal parallel to e1 - e2
Mesh triangulate(const Grid2& g);
// variant B on one parity class: diamonds cut along the diagonal parallel to e1
Mesh triangulate_sublattice(const Grid2& g, Parity p);

struct AffineQField {
    Mesh mesh;
    std::vector<Sym2> values;  // per grid site
    bool sublattice = false;
    Grid2 grid;

    double area(std::size_t t) const;
    // gradient of the three matrix entries, [entry][direction]
    std::array<std::array<double, 2>, 3> gradient(std::size_t t) const;
    double gradient_norm2(std::size_t t) const;
    Sym2 value_at(std::size_t t, const Point& x) const;
};

AffineQField affine_interpolate(const DirectorField2& f);
AffineQField affine_interpolate(const PCQField& f);
AffineQField affine_interpolate_sublattice(const DirectorField2& f, Parity p);

// sum over triangles of area x |grad|^2, clipped to the region when given
double dirichlet_energy(const AffineQField& f, const std::optional<Rect>& region = std::nullopt);

double pc_affine_l2_gap(const PCQField& pc, const AffineQField& aff);

struct SublatticeQField {
    Grid2 grid;
    Parity parity;
    std::vector<std::size_t> sites;
    std::vector<QTensor2> q;
    // value of the diamond cell |x - eps i|_1 <= eps containing x; nullopt if uncovered
    std::optional<Sym2> value_at(const Point& x) const;
};

std::pair<SublatticeQField, SublatticeQField> split_parity(const DirectorField2& f);

// three-dimensional boxes for the 3D bulk energy
struct Grid3 {
    int nx, ny, nz;
    double eps;
    Grid3(int nx, int ny, int nz, double eps);
    std::size_t size() const { return std::size_t(nx) * ny * nz; }
    bool contains(int i, int j, int k) const {
        return i >= 0 && i < nx && j >= 0 && j < ny && k >= 0 && k < nz;
    }
    std::size_t index(int i, int j, int k) const { return (std::size_t(k) * ny + j) * nx + i; }
    std::array<int, 3> site(std::size_t s) const {
        return {int(s % nx), int((s / nx) % ny), int(s / (std::size_t(nx) * ny))};
    }
};

struct DirectorField3 {
    Grid3 grid;
    std::vector<Director3> u;
    DirectorField3(const Grid3& g, std::vector<Director3> values);
};

}  // namespace nemlat
