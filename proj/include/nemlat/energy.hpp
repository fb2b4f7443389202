#pragma once

#include <array>
#include <string>
#include <vector>

#include "nemlat/lattice.hpp"
#include "nemlat/potential.hpp"

namespace nemlat {

enum class BondSet { NN2D, NN3DQuarterNNN, Competition, LongRange };
enum class Scaling { Bulk, FirstOrder, Concentration };

struct LongRangeCoefficient {
    std::array<int, 2> xi;
    double c;
};

struct EnergySpec {
    Potential potential;
    BondSet bonds = BondSet::NN2D;
    Scaling scaling = Scaling::Bulk;
    std::vector<LongRangeCoefficient> coefficients;  // LongRange only
};

struct BondClass {
    std::string name;
    double sum = 0.0;
    std::size_t bonds = 0;  // ordered pairs
};

struct EnergyBreakdown {
    double total = 0.0;
    std::vector<BondClass> classes;
};

// ordered pairs, each weighted by eps^N (and 1/4 on the 3D diagonal class)
EnergyBreakdown bulk_energy(const EnergySpec& spec, const DirectorField2& field);
EnergyBreakdown bulk_energy(const EnergySpec& spec, const DirectorField3& field);

// unscaled sum of f - inf f over ordered bonds
double first_order_energy(const EnergySpec& spec, const DirectorField2& field);
double first_order_energy(const EnergySpec& spec, const DirectorField3& field);

// ordered nearest-neighbour sum of 1 - (u.v)^2, unscaled and divided by |log eps|
double nn_defect_sum(const DirectorField2& field);
double concentration_energy(const DirectorField2& field);

struct DualBound {
    double lhs;  // bulk energy
    double rhs;  // 2 eps^2 sum of fhat over dual nodes
};

DualBound dual_lower_bound(const DirectorField2& field, const Potential& f);

struct HedgehogRow {
    double eps;
    double value;     // sum of (1 - |u.v|)^2
    double contrast;  // same field, sum of 1 - (u.v)^2
};

// u(x) = x/|x| on [-1,1]^2, origin set to e1
std::vector<HedgehogRow> hedgehog_counterexample(const std::vector<double>& eps_list);
double hedgehog_bound();

void validate_coefficients(const std::vector<LongRangeCoefficient>& c);
double long_range_prefactor(const std::vector<LongRangeCoefficient>& c);
// c^xi = |xi|^-6 for 0 < |xi| <= R
std::vector<LongRangeCoefficient> power_law_coefficients(double R);

}  // namespace nemlat
