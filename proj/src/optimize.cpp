#include "nemlat/optimize.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace nemlat {

std::vector<double> numeric_gradient(const Objective& f, const std::vector<double>& x, double h) {
    std::vector<double> g(x.size()), y = x;
    for (std::size_t k = 0; k < x.size(); ++k) {
        double step = h * (1.0 + std::fabs(x[k]));
        y[k] = x[k] + step;
        double fp = f(y);
        y[k] = x[k] - step;
        double fm = f(y);
        y[k] = x[k];
        g[k] = (fp - fm) / (2 * step);
    }
    return g;
}

MinimizeResult bfgs(const Objective& f, std::vector<double> x0, int max_iter, double gtol, double fd_step) {
    const int n = int(x0.size());
    using Vec = Eigen::VectorXd;
    auto to_std = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    Vec x = Eigen::Map<Vec>(x0.data(), n);
    double fx = f(x0);
    std::vector<double> g0 = numeric_gradient(f, x0, fd_step);
    Vec g = Eigen::Map<Vec>(g0.data(), n);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    int it = 0;
    for (; it < max_iter; ++it) {
        if (g.norm() <= gtol) break;
        Vec p = -H * g;
        if (p.dot(g) >= 0) {
            H.setIdentity();
            p = -g;
        }
        double t = 1.0, fn = fx;
        Vec xn = x;
        bool accepted = false;
        for (int k = 0; k < 40; ++k) {
            xn = x + t * p;
            fn = f(to_std(xn));
            if (fn <= fx + 1e-4 * t * p.dot(g)) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
        std::vector<double> gn_std = numeric_gradient(f, to_std(xn), fd_step);
        Vec gn = Eigen::Map<Vec>(gn_std.data(), n);
        Vec s = xn - x, yv = gn - g;
        double sy = s.dot(yv);
        if (sy > 1e-16) {
            double rho = 1.0 / sy;
            Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
            H = (I - rho * s * yv.transpose()) * H * (I - rho * yv * s.transpose()) + rho * s * s.transpose();
        }
        bool stalled = std::fabs(fx - fn) <= 1e-16 * (1.0 + std::fabs(fx));
        x = xn;
        fx = fn;
        g = gn;
        if (stalled) break;
    }
    return {to_std(x), fx, it};
}

}  // namespace nemlat
