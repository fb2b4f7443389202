#pragma once

#include <array>
#include <cstdint>
#include <functional>

#include "nemlat/energy.hpp"
#include "nemlat/envelope.hpp"
#include "nemlat/lattice.hpp"

namespace nemlat {

enum class Optimizer { Auto, Exhaustive, Anneal };

struct AnnealOptions {
    int steps_per_site = 200;  // per temperature
    double cooling = 0.95;
    int temperatures = 20;
    int restarts = 5;
    double lambda0 = 10.0;  // x10 per restart
    std::uint64_t seed = 1;
};

struct CellProblemSpec2 {
    QTensor2 target = QTensor2::half_identity();
    double rho = 0.05;
    int window = 8;
    int M = 64;  // angles pi k / M
    BondSet bonds = BondSet::NN2D;
    Optimizer optimizer = Optimizer::Auto;
    AnnealOptions anneal;
};

struct CellProblemSpec3 {
    QTensor3 target = QTensor3::third_identity();
    double rho = 0.05;
    int window = 4;
    int level = 1;  // icosahedral refinement of the direction set
    Optimizer optimizer = Optimizer::Auto;
    AnnealOptions anneal;
};

struct CellProblemResult2 {
    double value_per_volume;
    double energy;
    DirectorField2 best;
    QTensor2 mean;
    double distance;  // |mean - target|, Frobenius
    bool exhaustive;
    std::uint64_t seed;
};

struct CellProblemResult3 {
    double value_per_volume;
    double energy;
    DirectorField3 best;
    Sym3 mean;
    double distance;
    bool exhaustive;
    std::uint64_t seed;
};

// configurations counted exhaustively up to this size
inline constexpr double kExhaustiveLimit = 1e7;

CellProblemResult2 cell_problem_min(const CellProblemSpec2& spec, const Potential& f);
CellProblemResult3 cell_problem_min(const CellProblemSpec3& spec, const Potential& f);

// antipodal classes of a refined icosahedron
std::vector<Director3> sphere_directions(int level);

// u on even sites, v on odd sites, (u, v) = decompose2(q)
DirectorField2 checkerboard_recovery(const QTensor2& q, const Grid2& g);

// n rotated by +alpha on even sites and -alpha on odd sites, cos(2 alpha) = s
DirectorField2 oscillating_recovery(const Grid2& g, const std::function<double(const Point&)>& n_angle, double s);

struct Recovery3D {
    DirectorField3 field;
    std::array<Director3, 4> pattern;  // p, q, r, s
    double density;           // mean site energy over interior sites
    double boundary_density;  // total free-boundary energy per site
    double pairwise;          // sum over i<j of f(u_i, u_j)
    double target() const { return 1.5 * pairwise; }
};

// 2-periodic cell: colour of (a,b,c) is (a+c, b+c) mod 2
Recovery3D recovery_3d(const QTensor3& q, const Potential& f, int window, const Fhat3DOptions& opt = {});
Recovery3D recovery_3d(const std::array<Director3, 4>& pattern, const Potential& f, int window);
// true when every axis-aligned unit face carries all four pattern values
bool faces_see_all_values(const DirectorField3& f, const std::array<Director3, 4>& pattern);

}  // namespace nemlat
