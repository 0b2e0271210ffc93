#pragma once

#include <Eigen/Core>

#include <functional>

namespace chromaterm {

/// Closed box lower <= x <= upper; infinite entries leave a side unbounded.
struct Box {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    bool contains(const Eigen::VectorXd& x) const;
    Eigen::VectorXd project(const Eigen::VectorXd& x) const;
};

/// Sum-of-squares objective f(x) = sum r_i(x)^2 with its Gauss-Newton linearisation.
struct LeastSquaresProblem {
    struct Linearisation {
        double objective = 0.0;
        Eigen::VectorXd jtr;  // J^T r
        Eigen::MatrixXd jtj;  // J^T J
    };

    std::function<double(const Eigen::VectorXd&)> objective;
    std::function<Linearisation(const Eigen::VectorXd&)> linearise;
};

struct OptimiserOptions {
    int max_iterations = 1000;
    /// Stop once an accepted step lowers the objective by less than this.
    double tolerance = 1e-3;
    /// Called with every accepted iterate, including the starting point.
    std::function<void(const Eigen::VectorXd&)> on_iterate;
};

enum class StopReason { converged, max_iterations, stalled };

struct OptimiserResult {
    Eigen::VectorXd x;
    double objective = 0.0;
    double initial_objective = 0.0;
    int iterations = 0;
    StopReason reason = StopReason::stalled;
};

/// Projected Levenberg-Marquardt. Variables resting on a bound whose gradient
/// points out of the box are frozen for the step; the trial point is projected
/// onto the box and only accepted if it lowers the objective, so iterates never
/// leave the box and the objective never increases. Deterministic.
OptimiserResult minimise_box_least_squares(const LeastSquaresProblem& problem, const Eigen::VectorXd& start,
                                           const Box& box, const OptimiserOptions& options);

}  // namespace chromaterm
