#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "nemlat/lp.hpp"
#include "nemlat/potential.hpp"
#include "nemlat/qtensor.hpp"

namespace nemlat {

// largest nondecreasing convex minorant on the same grid
SampledFunction1D monotone_convex_envelope(const SampledFunction1D& h);

double fhat_radial(const SampledFunction1D& h, const QTensor2& q);
double fhat_radial(const Potential& f, const QTensor2& q);
// M orthonormal pairs are scanned at the unordered state
double fhat_anisotropic_2d(const Potential& f, const QTensor2& q, int M = 3600);

// nodes are deviatoric coordinates (q1,q2), |(q1,q2)| <= 1/2
struct SampledSurface {
    std::vector<std::array<double, 2>> nodes;
    std::vector<double> values;
};

void validate_surface(const SampledSurface& s);
// centre plus `radii` rings of `angles` nodes
std::vector<std::array<double, 2>> disk_nodes(int angles = 64, int radii = 32);
SampledSurface sample_fhat(const Potential& f, const std::vector<std::array<double, 2>>& nodes, int M = 3600);
SampledSurface convex_envelope_disk(const SampledSurface& s);
double envelope_at(const SampledSurface& s, double q1, double q2);

struct Hom2DOptions {
    int grid_nodes = 1001;
    int angles = 64;
    int radii = 32;
    int M = 3600;
    bool force_surface = false;  // skip the isotropic shortcut
};

// 4 f^** with the relaxed surface or envelope built once
class Hom2D {
public:
    Hom2D(const Potential& f, const Hom2DOptions& opt = {});
    double operator()(const QTensor2& q) const;
    double relaxed(const QTensor2& q) const;  // envelope of fhat
    bool uses_profile() const { return profile_ != nullptr; }

private:
    Potential f_;
    Hom2DOptions opt_;
    std::unique_ptr<SampledFunction1D> profile_;
    std::unique_ptr<LowerEnvelope> surface_;
};

double f_hom_2d(const Potential& f, const QTensor2& q, const Hom2DOptions& opt = {});

struct Fhat3DOptions {
    int starts = 8;
    std::uint64_t seed = 1;
    double feasibility = 1e-6;
};

struct Fhat3DResult {
    double value;
    std::array<Director3, 4> certificate;
    double residual;
};

double pairwise_sum(const Potential& f, const std::array<Director3, 4>& quad);
Fhat3DResult fhat_3d(const Potential& f, const QTensor3& q, const Fhat3DOptions& opt = {});

struct Hom3DOptions {
    int slice_steps = 8;
    Fhat3DOptions fhat;
};

struct Hom3DResult {
    double value;       // (3/2) envelope over the eigenvalue slice, an upper estimate
    double fhat_value;  // fhat_3d at the query itself
    std::size_t slice_nodes;
};

Hom3DResult f_hom_3d(const Potential& f, const QTensor3& q, const Hom3DOptions& opt = {});

}  // namespace nemlat
