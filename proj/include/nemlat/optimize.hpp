#pragma once

#include <functional>
#include <vector>

namespace nemlat {

using Objective = std::function<double(const std::vector<double>&)>;

struct MinimizeResult {
    std::vector<double> x;
    double value;
    int iterations;
};

// quasi-Newton with central-difference gradients and Armijo backtracking
MinimizeResult bfgs(const Objective& f, std::vector<double> x0, int max_iter = 200, double gtol = 1e-10,
                    double fd_step = 1e-7);

std::vector<double> numeric_gradient(const Objective& f, const std::vector<double>& x, double h);

}  // namespace nemlat
