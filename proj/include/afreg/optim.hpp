#pragma once

#include <functional>

#include <Eigen/Dense>

namespace afreg::optim {

using Objective = std::function<double(const Eigen::VectorXd&)>;
using Gradient = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct BfgsOptions {
    int max_iter = 200;
    double grad_tol = 1e-8;
    double f_tol = 1e-14;       // relative decrease below which we stop
    double fd_step = 1e-6;      // central-difference step when no gradient is given
};

struct BfgsResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Central-difference gradient with a step scaled to |x_i|.
Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x, double step);

/// Minimizes f with BFGS and a backtracking line search. The returned point is
/// the best one evaluated, so the result is never worse than x0.
BfgsResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0, const BfgsOptions& options = {},
                         const Gradient& gradient = nullptr);

}  // namespace afreg::optim
