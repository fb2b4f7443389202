#pragma once

#include <vector>

namespace nemlat {

struct EnvelopeSolution {
    double value;
    std::vector<int> support;
    std::vector<double> weights;
};

// lower convex envelope of a finite point cloud (x_k, v_k), x_k in R^d, evaluated by
// min sum l_k v_k  s.t.  sum l_k = 1, sum l_k x_k = x, l >= 0
class LowerEnvelope {
public:
    LowerEnvelope(int dim, std::vector<double> coords, std::vector<double> values);

    int dim() const { return dim_; }
    std::size_t size() const { return values_.size(); }
    // throws CoverageError when x lies outside the convex hull of the nodes
    EnvelopeSolution solve(const std::vector<double>& x) const;
    double at(const std::vector<double>& x) const { return solve(x).value; }

private:
    int dim_;
    std::vector<double> coords_;
    std::vector<double> values_;
};

}  // namespace nemlat
