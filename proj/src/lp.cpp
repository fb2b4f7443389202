#include "nemlat/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "nemlat/errors.hpp"

namespace nemlat {

LowerEnvelope::LowerEnvelope(int dim, std::vector<double> coords, std::vector<double> values)
    : dim_(dim), coords_(std::move(coords)), values_(std::move(values)) {
    if (dim_ < 1) throw InvalidSampling("dimension must be positive");
    if (coords_.size() != values_.size() * std::size_t(dim_)) throw InvalidSampling("coordinate count mismatch");
    if (values_.size() < std::size_t(dim_ + 1)) throw InvalidSampling("too few nodes for an envelope");
    Eigen::MatrixXd pts(dim_, values_.size());
    for (std::size_t k = 0; k < values_.size(); ++k)
        for (int d = 0; d < dim_; ++d) pts(d, k) = coords_[k * dim_ + d] - coords_[d];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(pts);
    lu.setThreshold(1e-12);
    if (lu.rank() < dim_) throw InvalidSampling("nodes are affinely degenerate");
}

EnvelopeSolution LowerEnvelope::solve(const std::vector<double>& x) const {
    if (int(x.size()) != dim_) throw InvalidSampling("query dimension mismatch");
    const int m = dim_ + 1;
    const int n = int(values_.size());
    Eigen::VectorXd b(m);
    b(0) = 1.0;
    for (int d = 0; d < dim_; ++d) b(d + 1) = x[d];
    std::vector<double> sgn(m);
    for (int r = 0; r < m; ++r) sgn[r] = b(r) < 0 ? -1.0 : 1.0;

    auto column = [&](int j) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
        if (j < n) {
            c(0) = 1.0;
            for (int d = 0; d < dim_; ++d) c(d + 1) = coords_[std::size_t(j) * dim_ + d];
        } else {
            c(j - n) = sgn[j - n];
        }
        return c;
    };

    double vscale = 1.0;
    for (double v : values_) vscale = std::max(vscale, std::fabs(v));

    std::vector<int> basis(m);
    std::vector<char> in_basis(n + m, 0);
    for (int r = 0; r < m; ++r) {
        basis[r] = n + r;
        in_basis[n + r] = 1;
    }
    Eigen::MatrixXd B(m, m), Binv(m, m);
    Eigen::VectorXd xB(m);

    auto refresh = [&]() {
        for (int r = 0; r < m; ++r) B.col(r) = column(basis[r]);
        Binv = B.fullPivLu().inverse();
        xB = Binv * b;
        for (int r = 0; r < m; ++r)
            if (xB(r) < 0 && xB(r) > -1e-13) xB(r) = 0;
    };

    auto run_phase = [&](bool phase1) {
        auto cost = [&](int j) { return j < n ? (phase1 ? 0.0 : values_[j]) : (phase1 ? 1.0 : 0.0); };
        double tol = phase1 ? 1e-12 : 1e-12 * vscale;
        int degenerate = 0;
        for (int iter = 0; iter < 20000; ++iter) {
            refresh();
            Eigen::VectorXd cB(m);
            for (int r = 0; r < m; ++r) cB(r) = cost(basis[r]);
            Eigen::RowVectorXd y = cB.transpose() * Binv;
            bool bland = degenerate > 30;
            int enter = -1;
            double best = -tol;
            int limit = phase1 ? n + m : n;
            for (int j = 0; j < limit; ++j) {
                if (in_basis[j]) continue;
                double dj = cost(j) - y.dot(column(j));
                if (dj < best) {
                    best = dj;
                    enter = j;
                    if (bland) break;
                }
            }
            if (enter < 0) return;
            Eigen::VectorXd w = Binv * column(enter);
            int leave = -1;
            double ratio = std::numeric_limits<double>::infinity();
            for (int r = 0; r < m; ++r) {
                if (w(r) <= 1e-12) continue;
                double t = std::max(xB(r), 0.0) / w(r);
                if (t < ratio - 1e-15 || (t <= ratio + 1e-15 && leave >= 0 && basis[r] < basis[leave])) {
                    ratio = std::min(ratio, t);
                    leave = r;
                }
            }
            if (leave < 0) throw InternalConsistency("envelope program unbounded");
            degenerate = ratio <= 1e-15 ? degenerate + 1 : 0;
            in_basis[basis[leave]] = 0;
            basis[leave] = enter;
            in_basis[enter] = 1;
        }
        throw InternalConsistency("envelope program did not terminate");
    };

    run_phase(true);
    refresh();
    double infeas = 0;
    for (int r = 0; r < m; ++r)
        if (basis[r] >= n) infeas += xB(r);
    if (infeas > 1e-9) throw CoverageError("query point outside the node hull");

    // drive zero-level artificials out where possible
    for (int r = 0; r < m; ++r) {
        if (basis[r] < n) continue;
        refresh();
        for (int j = 0; j < n; ++j) {
            if (in_basis[j]) continue;
            Eigen::VectorXd w = Binv * column(j);
            if (std::fabs(w(r)) > 1e-9) {
                in_basis[basis[r]] = 0;
                basis[r] = j;
                in_basis[j] = 1;
                break;
            }
        }
    }

    run_phase(false);
    refresh();
    EnvelopeSolution sol{0.0, {}, {}};
    for (int r = 0; r < m; ++r) {
        if (basis[r] >= n) continue;
        sol.value += values_[basis[r]] * xB(r);
        sol.support.push_back(basis[r]);
        sol.weights.push_back(xB(r));
    }
    return sol;
}

}  // namespace nemlat
