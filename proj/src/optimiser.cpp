#include <chromaterm/optimiser.hpp>

#include <chromaterm/error.hpp>

#include <Eigen/Dense>

#include <cassert>
#include <cmath>
#include <vector>

namespace chromaterm {

bool Box::contains(const Eigen::VectorXd& x) const {
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
    return true;
}

Eigen::VectorXd Box::project(const Eigen::VectorXd& x) const { return x.cwiseMax(lower).cwiseMin(upper); }

namespace {

constexpr double kInitialDamping = 1e-3;
constexpr double kMaxDamping = 1e14;

}  // namespace

OptimiserResult minimise_box_least_squares(const LeastSquaresProblem& problem, const Eigen::VectorXd& start,
                                           const Box& box, const OptimiserOptions& options) {
    if (options.max_iterations < 1) throw usage_error("optimiser needs at least one iteration");
    if (!(options.tolerance > 0.0)) throw usage_error("optimiser tolerance must be positive");

    OptimiserResult result;
    result.x = box.project(start);
    result.objective = problem.objective(result.x);
    result.initial_objective = result.objective;
    if (!std::isfinite(result.objective)) throw numerical_error("objective is not finite at the starting point");
    if (options.on_iterate) options.on_iterate(result.x);

    const Eigen::Index n = result.x.size();
    double damping = kInitialDamping;

    while (result.iterations < options.max_iterations) {
        ++result.iterations;
        const auto lin = problem.linearise(result.x);

        std::vector<Eigen::Index> free;
        for (Eigen::Index i = 0; i < n; ++i) {
            const bool pinned_low = result.x[i] <= box.lower[i] && lin.jtr[i] > 0.0;
            const bool pinned_high = result.x[i] >= box.upper[i] && lin.jtr[i] < 0.0;
            if (!pinned_low && !pinned_high) free.push_back(i);
        }
        const auto m = static_cast<Eigen::Index>(free.size());
        Eigen::VectorXd g(m);
        Eigen::MatrixXd h(m, m);
        for (Eigen::Index a = 0; a < m; ++a) {
            g[a] = lin.jtr[free[a]];
            for (Eigen::Index b = 0; b < m; ++b) h(a, b) = lin.jtj(free[a], free[b]);
        }
        if (m == 0 || g.norm() == 0.0) {
            result.reason = StopReason::converged;
            return result;
        }
        // Marquardt scaling; flat directions get a floor so they stay regularised.
        Eigen::VectorXd scale = h.diagonal();
        const double floor = std::max(scale.maxCoeff() * 1e-12, 1e-300);
        scale = scale.cwiseMax(floor);

        bool accepted = false;
        while (damping <= kMaxDamping) {
            Eigen::MatrixXd damped = h;
            damped.diagonal() += damping * scale;
            const Eigen::VectorXd step = damped.ldlt().solve(-g);
            Eigen::VectorXd trial = result.x;
            for (Eigen::Index a = 0; a < m; ++a) trial[free[a]] += step[a];
            trial = box.project(trial);
            const double f = step.allFinite() ? problem.objective(trial) : INFINITY;
            if (std::isfinite(f) && f < result.objective) {
                const double improvement = result.objective - f;
                result.x = trial;
                result.objective = f;
                assert(box.contains(result.x));
                if (options.on_iterate) options.on_iterate(result.x);
                damping = std::max(damping / 3.0, 1e-12);
                accepted = true;
                if (improvement < options.tolerance) {
                    result.reason = StopReason::converged;
                    return result;
                }
                break;
            }
            damping *= 4.0;
        }
        if (!accepted) {
            result.reason = StopReason::stalled;
            return result;
        }
    }
    result.reason = StopReason::max_iterations;
    return result;
}

}  // namespace chromaterm
